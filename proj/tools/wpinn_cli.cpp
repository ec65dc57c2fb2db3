// Command-line driver for the wpinn library.
//
// Subcommands:
//   run <config>                 train per the config, emit result records
//   lambda <config>              print magnitude bounds and loss weights only
//   dump-field <config> <params> evaluate saved parameters on the error grid

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wpinn/experiment.hpp"
#include "wpinn/rng.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> iterations;
  std::optional<std::string> out;
  std::optional<std::string> format;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("config", flags.config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "replace the config's seed list with this single seed");
  cmd->add_option("--iterations", flags.iterations, "override the iteration budget");
  cmd->add_option("--out", flags.out, "output path (default: config 'out' key, else stdout)");
  cmd->add_option("--format", flags.format, "result format")
      ->check(CLI::IsMember({"csv", "json"}));
}

wpinn::ExperimentConfig load_config(const CommonFlags& flags) {
  wpinn::ExperimentConfig config = wpinn::parse_config_file(flags.config_path);
  if (flags.seed) config.seeds = {*flags.seed};
  if (flags.iterations) config.iterations = *flags.iterations;
  if (flags.out) config.out = *flags.out;
  if (flags.format) config.format = wpinn::format_from_string(*flags.format);
  config.validate();
  return config;
}

std::string run_file_name(const std::string& prefix, const wpinn::ResultRecord& record,
                          const char* extension) {
  std::ostringstream name;
  name << prefix << '_' << wpinn::to_string(record.method) << "_seed" << record.seed
       << extension;
  return name.str();
}

int cmd_run(const CommonFlags& flags) {
  const wpinn::ExperimentConfig config = load_config(flags);
  const std::vector<wpinn::ResultRecord> records = wpinn::run_experiment(config);

  if (config.out.empty()) {
    wpinn::emit_results(records, config.format, std::cout);
  } else {
    wpinn::emit_results(records, config.format, config.out);
  }

  if (!config.params_out.empty() || !config.trace_out.empty()) {
    const wpinn::LinearPDEProblem problem = wpinn::build_problem(config);
    wpinn::NetworkArchitecture arch;
    arch.input_dim = problem.dim;
    arch.hidden = config.hidden;
    for (const wpinn::ResultRecord& record : records) {
      if (!config.params_out.empty()) {
        wpinn::save_parameters(run_file_name(config.params_out, record, ".txt"), arch,
                               record.seed, record.params);
      }
      if (!config.trace_out.empty()) {
        std::ofstream trace(run_file_name(config.trace_out, record, ".csv"));
        if (!trace) throw std::runtime_error("cannot open trace output file");
        wpinn::write_trace_csv(record.trace, trace);
      }
    }
  }
  return 0;
}

int cmd_lambda(const CommonFlags& flags) {
  const wpinn::ExperimentConfig config = load_config(flags);
  const wpinn::LinearPDEProblem problem = wpinn::build_problem(config);

  wpinn::MagnitudeBounds bounds;
  const bool use_closed_form = config.lambda_mode == wpinn::LambdaMode::closed_form &&
                               problem.closed_form_bounds &&
                               problem.closed_form_bounds->p == config.p;
  if (use_closed_form) {
    bounds = *problem.closed_form_bounds;
  } else {
    if (!problem.solution) {
      throw std::runtime_error("problem " + problem.name +
                               " has no analytic solution to estimate magnitude bounds from");
    }
    std::mt19937_64 rng(wpinn::SeedStream(config.seeds.front(), 3).next());
    bounds = wpinn::estimate_magnitude_bounds(problem, problem.solution, rng, 100000, 100000,
                                              config.p, /*include_source=*/false);
  }

  std::cout.precision(12);
  std::cout << "problem = " << problem.name << '\n'
            << "source = " << (use_closed_form ? "closed_form" : "monte_carlo") << '\n'
            << "m_interior = " << bounds.interior << '\n'
            << "m_boundary = " << bounds.boundary << '\n'
            << "lambda_optimal = " << wpinn::optimal_lambda(bounds) << '\n'
            << "lambda_original = " << wpinn::lambda_original(problem) << '\n';
  return 0;
}

int cmd_dump_field(const CommonFlags& flags, const std::string& params_path) {
  const wpinn::ExperimentConfig config = load_config(flags);
  const wpinn::LinearPDEProblem problem = wpinn::build_problem(config);
  const wpinn::SavedParameters saved = wpinn::load_parameters(params_path);
  if (saved.arch.input_dim != problem.dim) {
    throw std::runtime_error("parameter file was trained on a " +
                             std::to_string(saved.arch.input_dim) +
                             "-dimensional problem, config problem is " +
                             std::to_string(problem.dim) + "-dimensional");
  }
  const wpinn::TanhNetwork net(saved.arch);
  if (config.out.empty()) {
    wpinn::dump_field(net, saved.params, problem.solution, problem.dim, config.eval_resolution,
                      std::cout);
  } else {
    wpinn::dump_field(net, saved.params, problem.solution, problem.dim, config.eval_resolution,
                      config.out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted-residual neural PDE solver"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "train networks per the config and emit results");
  add_common_flags(run, run_flags);

  CommonFlags lambda_flags;
  CLI::App* lambda =
      app.add_subcommand("lambda", "print magnitude bounds and loss weights, no training");
  add_common_flags(lambda, lambda_flags);

  CommonFlags dump_flags;
  std::string params_path;
  CLI::App* dump =
      app.add_subcommand("dump-field", "evaluate saved parameters over the error grid");
  add_common_flags(dump, dump_flags);
  dump->add_option("params", params_path, "saved parameter file")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (lambda->parsed()) return cmd_lambda(lambda_flags);
    if (dump->parsed()) return cmd_dump_field(dump_flags, params_path);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  }
  return 1;
}
