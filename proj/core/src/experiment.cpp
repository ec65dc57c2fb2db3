#include "wpinn/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wpinn/rng.hpp"

namespace wpinn {

namespace {

constexpr std::uint64_t kLambdaStreamId = 3;
constexpr Eigen::Index kLambdaSamples = 100000;
constexpr Eigen::Index kMonteCarloEvalPoints = 100000;
constexpr Eigen::Index kEvalChunk = 4096;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

[[noreturn]] void config_error(const std::string& message) {
  throw std::invalid_argument("config: " + message);
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::string normalized = value;
  std::replace(normalized.begin(), normalized.end(), ',', ' ');
  std::istringstream in(normalized);
  std::vector<std::string> items;
  std::string item;
  while (in >> item) items.push_back(item);
  return items;
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &pos);
  } catch (const std::exception&) {
    config_error("key '" + key + "': cannot parse '" + value + "' as a number");
  }
  if (pos != value.size()) {
    config_error("key '" + key + "': trailing characters in '" + value + "'");
  }
  return out;
}

long long parse_integer(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long long out = 0;
  try {
    out = std::stoll(value, &pos);
  } catch (const std::exception&) {
    config_error("key '" + key + "': cannot parse '" + value + "' as an integer");
  }
  if (pos != value.size()) {
    config_error("key '" + key + "': trailing characters in '" + value + "'");
  }
  return out;
}

std::uint64_t parse_seed(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  unsigned long long out = 0;
  try {
    out = std::stoull(value, &pos);
  } catch (const std::exception&) {
    config_error("key '" + key + "': cannot parse '" + value + "' as a seed");
  }
  if (pos != value.size()) {
    config_error("key '" + key + "': trailing characters in '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  config_error("key '" + key + "': expected true/false, got '" + value + "'");
}

std::vector<MethodKind> parse_methods(const std::string& value) {
  std::vector<MethodKind> methods;
  for (const std::string& item : split_list(value)) {
    if (item == "all") {
      return {MethodKind::original, MethodKind::optimal_weight,
              MethodKind::magnitude_normalization};
    }
    methods.push_back(method_from_string(item));
  }
  return methods;
}

}  // namespace

const char* to_string(MethodKind method) {
  switch (method) {
    case MethodKind::original:
      return "original";
    case MethodKind::optimal_weight:
      return "optimal_weight";
    case MethodKind::magnitude_normalization:
      return "magnitude_normalization";
  }
  return "unknown";
}

const char* to_string(OutputFormat format) {
  return format == OutputFormat::csv ? "csv" : "json";
}

MethodKind method_from_string(const std::string& name) {
  if (name == "original") return MethodKind::original;
  if (name == "optimal_weight") return MethodKind::optimal_weight;
  if (name == "magnitude_normalization") return MethodKind::magnitude_normalization;
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected original, optimal_weight, "
                              "magnitude_normalization, or all)");
}

OutputFormat format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown output format '" + name + "' (expected csv or json)");
}

void ExperimentConfig::validate() const {
  if (problem.empty()) config_error("missing required key 'problem'");
  if (dim && *dim < 1) config_error("dim must be >= 1");
  if (methods.empty()) config_error("no methods selected");
  if (hidden.empty()) config_error("hidden layer list is empty");
  for (int width : hidden) {
    if (width < 1) config_error("hidden layer widths must be positive");
  }
  if (iterations < 0) config_error("iterations must be >= 0");
  if (initial_interior < 1 || initial_boundary < 1) {
    config_error("initial point counts must be >= 1");
  }
  if (max_interior < 0 || max_boundary < 0) {
    config_error("max point counts must be >= 0 (0: unlimited)");
  }
  if (max_interior > 0 && max_interior < initial_interior) {
    config_error("max_interior must be >= initial_interior");
  }
  if (max_boundary > 0 && max_boundary < initial_boundary) {
    config_error("max_boundary must be >= initial_boundary");
  }
  if (!(q > 1.0)) config_error("q must be > 1");
  if (adaptive_interval < 1) config_error("adaptive_interval must be >= 1");
  if (seeds.empty()) config_error("seed list is empty");
  if (!(p >= 1.0)) config_error("p must be >= 1");
  if (history < 1) config_error("history must be >= 1");
  if (!(adam_step > 0.0)) config_error("adam_step must be positive");
  if (!(grad_tolerance >= 0.0)) config_error("grad_tolerance must be >= 0");
  if (eval_resolution < 2) config_error("eval_resolution must be >= 2");
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::set<std::string> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      config_error("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      config_error("line " + std::to_string(lineno) + ": empty key or value");
    }
    if (!seen.insert(key).second) {
      config_error("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }

    if (key == "problem") {
      cfg.problem = value;
    } else if (key == "dim") {
      cfg.dim = static_cast<int>(parse_integer(key, value));
    } else if (key == "omega_pi") {
      cfg.omegas.clear();
      for (const std::string& item : split_list(value)) {
        cfg.omegas.push_back(parse_double(key, item) * std::numbers::pi);
      }
      if (cfg.omegas.empty()) config_error("omega_pi: empty list");
    } else if (key == "velocity") {
      cfg.velocity = parse_double(key, value);
    } else if (key == "alpha") {
      cfg.alpha = parse_double(key, value);
    } else if (key == "paper_constant") {
      cfg.paper_constant = parse_bool(key, value);
    } else if (key == "method") {
      cfg.methods = parse_methods(value);
    } else if (key == "hidden") {
      cfg.hidden.clear();
      for (const std::string& item : split_list(value)) {
        cfg.hidden.push_back(static_cast<int>(parse_integer(key, item)));
      }
    } else if (key == "iterations") {
      cfg.iterations = static_cast<int>(parse_integer(key, value));
    } else if (key == "initial_interior") {
      cfg.initial_interior = parse_integer(key, value);
    } else if (key == "initial_boundary") {
      cfg.initial_boundary = parse_integer(key, value);
    } else if (key == "max_interior") {
      cfg.max_interior = parse_integer(key, value);
    } else if (key == "max_boundary") {
      cfg.max_boundary = parse_integer(key, value);
    } else if (key == "q") {
      cfg.q = parse_double(key, value);
    } else if (key == "adaptive_interval") {
      cfg.adaptive_interval = static_cast<int>(parse_integer(key, value));
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (const std::string& item : split_list(value)) {
        cfg.seeds.push_back(parse_seed(key, item));
      }
    } else if (key == "p") {
      cfg.p = parse_double(key, value);
    } else if (key == "lambda_mode") {
      if (value == "closed_form") {
        cfg.lambda_mode = LambdaMode::closed_form;
      } else if (value == "monte_carlo") {
        cfg.lambda_mode = LambdaMode::monte_carlo;
      } else {
        config_error("lambda_mode: expected closed_form or monte_carlo");
      }
    } else if (key == "optimizer") {
      if (value == "lbfgs") {
        cfg.optimizer = OptimizerKind::lbfgs;
      } else if (value == "adam") {
        cfg.optimizer = OptimizerKind::adam;
      } else {
        config_error("optimizer: expected lbfgs or adam");
      }
    } else if (key == "history") {
      cfg.history = static_cast<int>(parse_integer(key, value));
    } else if (key == "adam_step") {
      cfg.adam_step = parse_double(key, value);
    } else if (key == "grad_tolerance") {
      cfg.grad_tolerance = parse_double(key, value);
    } else if (key == "eval_resolution") {
      cfg.eval_resolution = static_cast<int>(parse_integer(key, value));
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "format") {
      cfg.format = format_from_string(value);
    } else if (key == "params_out") {
      cfg.params_out = value;
    } else if (key == "trace_out") {
      cfg.trace_out = value;
    } else {
      config_error("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

LinearPDEProblem build_problem(const ExperimentConfig& config) {
  config.validate();
  if (config.problem == "laplace_eigen") {
    const int dim = config.dim.value_or(2);
    if (config.omegas.empty()) config_error("laplace_eigen requires omega_pi");
    std::vector<double> frequencies = config.omegas;
    if (static_cast<int>(frequencies.size()) == 1 && dim > 2) {
      frequencies.assign(static_cast<std::size_t>(dim - 1), frequencies.front());
    }
    return laplace_eigen(dim, frequencies);
  }
  if (config.problem == "poisson_eigen") {
    if (config.dim && *config.dim != 2) config_error("poisson_eigen is two-dimensional");
    if (config.omegas.size() != 1) config_error("poisson_eigen requires a single omega_pi");
    return poisson_eigen(config.omegas.front());
  }
  if (config.problem == "poisson_peak") {
    if (config.dim && *config.dim != 2) config_error("poisson_peak is two-dimensional");
    if (!config.omegas.empty()) config_error("poisson_peak takes no omega_pi");
    return poisson_peak();
  }
  if (config.problem == "convection_diffusion") {
    if (config.dim && *config.dim != 1) config_error("convection_diffusion is one-dimensional");
    return convection_diffusion(config.velocity, config.alpha, config.paper_constant);
  }
  config_error("unknown problem '" + config.problem +
               "' (expected laplace_eigen, poisson_eigen, poisson_peak, or "
               "convection_diffusion)");
}

std::pair<double, double> relative_errors(const TanhNetwork& net, const Eigen::VectorXd& params,
                                          const JetField& solution,
                                          const Eigen::MatrixXd& eval_points) {
  if (!solution) throw std::invalid_argument("relative_errors: no analytic solution");
  if (eval_points.cols() == 0) throw std::invalid_argument("relative_errors: empty point set");

  double sum_err2 = 0.0, sum_u2 = 0.0, max_err = 0.0, max_u = 0.0;
  JetTape tape;
  for (Eigen::Index begin = 0; begin < eval_points.cols(); begin += kEvalChunk) {
    const Eigen::Index count = std::min(kEvalChunk, eval_points.cols() - begin);
    const JetBatch batch = net.eval_batch(params, eval_points.middleCols(begin, count), 0, tape);
    for (Eigen::Index k = 0; k < count; ++k) {
      const double u = solution(eval_points.col(begin + k)).value;
      const double err = std::abs(batch.value(k) - u);
      sum_err2 += err * err;
      sum_u2 += u * u;
      max_err = std::max(max_err, err);
      max_u = std::max(max_u, std::abs(u));
    }
  }
  if (!(sum_u2 > 0.0) || !(max_u > 0.0)) {
    throw std::invalid_argument(
        "relative_errors: the exact solution vanishes on the evaluation set");
  }
  return {std::sqrt(sum_err2) / std::sqrt(sum_u2), max_err / max_u};
}

Eigen::MatrixXd build_eval_points(int dim, int resolution, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("build_eval_points: dim must be >= 1");
  if (dim <= 3) {
    if (resolution < 2) {
      throw std::invalid_argument("build_eval_points: grid resolution must be >= 2");
    }
    Eigen::Index total = 1;
    for (int i = 0; i < dim; ++i) total *= resolution;
    Eigen::MatrixXd points(dim, total);
    for (Eigen::Index flat = 0; flat < total; ++flat) {
      Eigen::Index rest = flat;
      for (int axis = 0; axis < dim; ++axis) {
        const auto idx = static_cast<double>(rest % resolution);
        points(axis, flat) = idx / static_cast<double>(resolution - 1);
        rest /= resolution;
      }
    }
    return points;
  }
  std::mt19937_64 rng(mix_seed(seed));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Eigen::MatrixXd points(dim, kMonteCarloEvalPoints);
  for (Eigen::Index k = 0; k < kMonteCarloEvalPoints; ++k) {
    for (int axis = 0; axis < dim; ++axis) points(axis, k) = uniform(rng);
  }
  return points;
}

namespace {

/// One (method, seed) training run.
ResultRecord run_single(const ExperimentConfig& config, const LinearPDEProblem& problem,
                        const NetworkArchitecture& arch, const TanhNetwork& net,
                        const Eigen::MatrixXd& eval_points, MethodKind method,
                        std::uint64_t seed) {
  ResultRecord record;
  record.problem = problem.name;
  record.method = method;
  record.seed = seed;
  record.omega_or_alpha = problem.parameter;
  record.dim = problem.dim;

  LossStrategy strategy = LossStrategy::original(config.p);
  if (method == MethodKind::optimal_weight) {
    MagnitudeBounds bounds;
    if (config.lambda_mode == LambdaMode::closed_form && problem.closed_form_bounds &&
        problem.closed_form_bounds->p == config.p) {
      bounds = *problem.closed_form_bounds;
    } else {
      if (!problem.solution) {
        throw std::runtime_error("optimal_weight requires an analytic solution to estimate "
                                 "magnitude bounds for problem " + problem.name);
      }
      std::mt19937_64 rng(SeedStream(seed, kLambdaStreamId).next());
      bounds = estimate_magnitude_bounds(problem, problem.solution, rng, kLambdaSamples,
                                         kLambdaSamples, config.p, /*include_source=*/false);
    }
    record.lambda = optimal_lambda(bounds);
    strategy = LossStrategy::optimal_weight(record.lambda, config.p);
  } else if (method == MethodKind::magnitude_normalization) {
    strategy = LossStrategy::magnitude_normalized(config.p);
  }

  AdaptiveState state =
      make_adaptive_state(problem.dim, config.initial_interior, config.initial_boundary,
                          config.q, /*boundary_frozen=*/problem.dim == 1, seed);
  state.max_interior = config.max_interior;
  state.max_boundary = config.max_boundary;
  LossEvaluator train_eval(problem, arch, strategy);
  LossEvaluator val_eval(problem, arch, strategy);
  train_eval.set_points(state.train.interior, state.train.boundary);
  val_eval.set_points(state.validation.interior, state.validation.boundary);
  Objective objective = train_eval.as_log_objective();

  Eigen::VectorXd params = glorot_init(arch, seed);
  TrainingTrace trace;
  TerminationReason reason = TerminationReason::max_iterations;
  int used_iterations = 0;
  int offset = 0;

  const OptimizeCallback callback = [&](const IterationInfo& info,
                                        TraceRow& row) -> CallbackAction {
    const int global_iteration = offset + info.iteration;
    row.iteration = global_iteration;
    row.n_interior = state.n_interior;
    row.n_boundary = state.n_boundary;
    // info.objective is log(total) at the accepted iterate; last_breakdown()
    // may belong to a rejected line-search probe, so only reuse its components.
    const LossBreakdown& last = train_eval.last_breakdown();
    row.train_interior = last.interior;
    row.train_boundary = last.boundary;
    row.total = std::exp(info.objective);
    if (global_iteration % config.adaptive_interval == 0) {
      const LossBreakdown train_bd = train_eval.evaluate(info.params);
      const LossBreakdown val_bd = val_eval.evaluate(info.params);
      row.train_interior = train_bd.interior;
      row.train_boundary = train_bd.boundary;
      row.total = train_bd.total;
      row.validation_interior = val_bd.interior;
      row.validation_boundary = val_bd.boundary;
      const AdaptiveDecision decision = adaptive_check(state, train_bd.interior,
                                                       train_bd.boundary, val_bd.interior,
                                                       val_bd.boundary);
      if (apply_doubling(state, decision) != AdaptiveDecision::keep) {
        train_eval.set_points(state.train.interior, state.train.boundary);
        val_eval.set_points(state.validation.interior, state.validation.boundary);
        return CallbackAction::reset_history;
      }
    }
    return CallbackAction::proceed;
  };

  const auto start = Clock::now();
  int reentries = 0;
  while (used_iterations < config.iterations) {
    const int remaining = config.iterations - used_iterations;
    OptimizeResult result;
    if (config.optimizer == OptimizerKind::lbfgs) {
      LBFGSConfig ocfg;
      ocfg.history = config.history;
      ocfg.max_iterations = remaining;
      ocfg.grad_tolerance = config.grad_tolerance;
      result = lbfgs_minimize(objective, params, ocfg, callback);
    } else {
      AdamConfig ocfg;
      ocfg.step_size = config.adam_step;
      ocfg.max_iterations = remaining;
      ocfg.grad_tolerance = config.grad_tolerance;
      result = adam_minimize(objective, params, ocfg, callback);
    }
    trace.rows.insert(trace.rows.end(), result.trace.rows.begin(), result.trace.rows.end());
    used_iterations += result.iterations;
    offset = used_iterations;
    params = std::move(result.params);
    reason = result.reason;
    if (result.reason != TerminationReason::zero_loss &&
        result.reason != TerminationReason::line_search_failed) {
      break;
    }

    // The training loss hit exactly zero, or the optimizer stalled (e.g. the
    // magnitude-normalized interior ratio saturates at 1 on tiny point sets).
    // If validation agrees with training the run is genuinely done; otherwise
    // the point set is too small — double and resume.
    const LossBreakdown train_bd = train_eval.evaluate(params);
    const LossBreakdown val_bd = val_eval.evaluate(params);
    const AdaptiveDecision decision = adaptive_check(state, train_bd.interior, train_bd.boundary,
                                                     val_bd.interior, val_bd.boundary);
    if (decision == AdaptiveDecision::keep || ++reentries > 20) break;
    if (apply_doubling(state, decision) == AdaptiveDecision::keep) break;  // at the ceilings
    train_eval.set_points(state.train.interior, state.train.boundary);
    val_eval.set_points(state.validation.interior, state.validation.boundary);
  }
  record.wall_seconds = seconds_since(start);

  record.iterations = used_iterations;
  record.reason = reason;
  record.n_interior = state.n_interior;
  record.n_boundary = state.n_boundary;
  record.final_loss = train_eval.evaluate(params);
  std::tie(record.rel_l2, record.rel_linf) =
      relative_errors(net, params, problem.solution, eval_points);
  record.params = std::move(params);
  record.trace = std::move(trace);
  return record;
}

}  // namespace

std::vector<ResultRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const LinearPDEProblem problem = build_problem(config);
  NetworkArchitecture arch;
  arch.input_dim = problem.dim;
  arch.hidden = config.hidden;
  arch.validate();
  const TanhNetwork net(arch);
  const Eigen::MatrixXd eval_points = build_eval_points(problem.dim, config.eval_resolution);

  std::vector<ResultRecord> records;
  records.reserve(config.methods.size() * config.seeds.size());
  for (MethodKind method : config.methods) {
    for (std::uint64_t seed : config.seeds) {
      try {
        records.push_back(
            run_single(config, problem, arch, net, eval_points, method, seed));
      } catch (const std::exception& error) {
        throw std::runtime_error("run failed (problem=" + problem.name +
                                 ", method=" + to_string(method) +
                                 ", seed=" + std::to_string(seed) + "): " + error.what());
      }
    }
  }
  return records;
}

namespace {

std::string format_double(double value) {
  std::ostringstream out;
  out << std::setprecision(17) << value;
  return out.str();
}

void emit_csv(const std::vector<ResultRecord>& records, std::ostream& out) {
  out << "problem,method,seed,omega_or_alpha,dim,rel_l2,rel_linf,n_interior,n_boundary,"
         "iterations,wall_seconds\n";
  for (const ResultRecord& r : records) {
    out << r.problem << ',' << to_string(r.method) << ',' << r.seed << ','
        << format_double(r.omega_or_alpha) << ',' << r.dim << ',' << format_double(r.rel_l2)
        << ',' << format_double(r.rel_linf) << ',' << r.n_interior << ',' << r.n_boundary << ','
        << r.iterations << ',' << format_double(r.wall_seconds) << '\n';
  }
}

nlohmann::json breakdown_to_json(const LossBreakdown& b) {
  return nlohmann::json{{"interior", b.interior},
                        {"boundary", b.boundary},
                        {"interior_denominator", b.interior_denominator},
                        {"boundary_denominator", b.boundary_denominator},
                        {"total", b.total},
                        {"log_total", b.log_total}};
}

void emit_json(const std::vector<ResultRecord>& records, std::ostream& out) {
  nlohmann::json root = nlohmann::json::array();
  for (const ResultRecord& r : records) {
    nlohmann::json item{{"problem", r.problem},
                        {"method", to_string(r.method)},
                        {"seed", r.seed},
                        {"omega_or_alpha", r.omega_or_alpha},
                        {"dim", r.dim},
                        {"rel_l2", r.rel_l2},
                        {"rel_linf", r.rel_linf},
                        {"n_interior", r.n_interior},
                        {"n_boundary", r.n_boundary},
                        {"iterations", r.iterations},
                        {"wall_seconds", r.wall_seconds},
                        {"reason", to_string(r.reason)},
                        {"final_loss", breakdown_to_json(r.final_loss)}};
    if (std::isfinite(r.lambda)) {
      item["lambda"] = r.lambda;
    } else {
      item["lambda"] = nullptr;
    }
    root.push_back(std::move(item));
  }
  out << root.dump(2) << '\n';
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

}  // namespace

void emit_results(const std::vector<ResultRecord>& records, OutputFormat format,
                  std::ostream& out) {
  if (format == OutputFormat::csv) {
    emit_csv(records, out);
  } else {
    emit_json(records, out);
  }
  if (!out) throw std::runtime_error("emit_results: write failed");
}

void emit_results(const std::vector<ResultRecord>& records, OutputFormat format,
                  const std::string& path) {
  std::ofstream out = open_output(path);
  emit_results(records, format, out);
}

void write_trace_csv(const TrainingTrace& trace, std::ostream& out) {
  out << "iteration,train_interior,train_boundary,validation_interior,validation_boundary,"
         "total,n_interior,n_boundary,wall_seconds\n";
  for (const TraceRow& row : trace.rows) {
    out << row.iteration << ',' << format_double(row.train_interior) << ','
        << format_double(row.train_boundary) << ',' << format_double(row.validation_interior)
        << ',' << format_double(row.validation_boundary) << ',' << format_double(row.total)
        << ',' << row.n_interior << ',' << row.n_boundary << ','
        << format_double(row.wall_seconds) << '\n';
  }
  if (!out) throw std::runtime_error("write_trace_csv: write failed");
}

void dump_field(const TanhNetwork& net, const Eigen::VectorXd& params, const JetField& solution,
                int dim, int resolution, std::ostream& out) {
  if (!solution) throw std::invalid_argument("dump_field: no analytic solution");
  const Eigen::MatrixXd points = build_eval_points(dim, resolution);

  for (int axis = 1; axis <= dim; ++axis) out << 'x' << axis << ',';
  out << "u_hat,u_exact,abs_error\n";

  JetTape tape;
  for (Eigen::Index begin = 0; begin < points.cols(); begin += kEvalChunk) {
    const Eigen::Index count = std::min(kEvalChunk, points.cols() - begin);
    const JetBatch batch = net.eval_batch(params, points.middleCols(begin, count), 0, tape);
    for (Eigen::Index k = 0; k < count; ++k) {
      const Eigen::VectorXd x = points.col(begin + k);
      const double u = solution(x).value;
      const double u_hat = batch.value(k);
      for (int axis = 0; axis < dim; ++axis) out << format_double(x(axis)) << ',';
      out << format_double(u_hat) << ',' << format_double(u) << ','
          << format_double(std::abs(u_hat - u)) << '\n';
    }
  }
  if (!out) throw std::runtime_error("dump_field: write failed");
}

void dump_field(const TanhNetwork& net, const Eigen::VectorXd& params, const JetField& solution,
                int dim, int resolution, const std::string& path) {
  std::ofstream out = open_output(path);
  dump_field(net, params, solution, dim, resolution, out);
}

void save_parameters(const std::string& path, const NetworkArchitecture& arch,
                     std::uint64_t seed, const Eigen::VectorXd& params) {
  arch.validate();
  if (params.size() != arch.parameter_count()) {
    throw std::invalid_argument("save_parameters: parameter count " +
                                std::to_string(params.size()) + " does not match architecture (" +
                                std::to_string(arch.parameter_count()) + ")");
  }
  std::ofstream out = open_output(path);
  out << "wpinn-params v1\n";
  out << "input_dim " << arch.input_dim << '\n';
  out << "hidden";
  for (int width : arch.hidden) out << ' ' << width;
  out << '\n';
  out << "seed " << seed << '\n';
  out << "count " << params.size() << '\n';
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < params.size(); ++i) out << params(i) << '\n';
  if (!out) throw std::runtime_error("save_parameters: write failed");
}

SavedParameters load_parameters(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open parameter file: " + path);

  auto fail = [&path](const std::string& what) -> void {
    throw std::runtime_error("parameter file " + path + ": " + what);
  };

  std::string line;
  if (!std::getline(in, line) || trim(line) != "wpinn-params v1") fail("bad magic line");

  SavedParameters saved;
  std::string word;
  Eigen::Index count = -1;
  if (!(in >> word) || word != "input_dim" || !(in >> saved.arch.input_dim)) {
    fail("bad input_dim line");
  }
  if (!(in >> word) || word != "hidden") fail("bad hidden line");
  saved.arch.hidden.clear();
  if (!std::getline(in, line)) fail("bad hidden line");
  for (const std::string& item : split_list(line)) {
    saved.arch.hidden.push_back(static_cast<int>(parse_integer("hidden", item)));
  }
  if (!(in >> word) || word != "seed" || !(in >> saved.seed)) fail("bad seed line");
  if (!(in >> word) || word != "count" || !(in >> count)) fail("bad count line");
  saved.arch.validate();
  if (count != saved.arch.parameter_count()) fail("count does not match architecture");
  saved.params.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    if (!(in >> saved.params(i))) fail("truncated parameter list");
  }
  return saved;
}

}  // namespace wpinn
