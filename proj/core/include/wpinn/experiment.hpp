#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wpinn/loss.hpp"
#include "wpinn/model_problems.hpp"
#include "wpinn/network.hpp"
#include "wpinn/optimize.hpp"
#include "wpinn/sampling.hpp"

namespace wpinn {

enum class MethodKind { original, optimal_weight, magnitude_normalization };
enum class LambdaMode { closed_form, monte_carlo };
enum class OptimizerKind { lbfgs, adam };
enum class OutputFormat { csv, json };

const char* to_string(MethodKind method);
const char* to_string(OutputFormat format);
MethodKind method_from_string(const std::string& name);
OutputFormat format_from_string(const std::string& name);

/// Everything that determines an experiment.  Every run is a pure function
/// of this record (plus the seed list inside it).
struct ExperimentConfig {
  // problem selection
  std::string problem;          ///< laplace_eigen | poisson_eigen | poisson_peak | convection_diffusion
  std::optional<int> dim;       ///< unset: the problem's natural dimension
  std::vector<double> omegas;   ///< radians; config key omega_pi supplies multiples of pi
  double velocity = 1.0;        ///< convection_diffusion v
  double alpha = 0.1;           ///< convection_diffusion diffusivity
  bool paper_constant = false;  ///< use the source text's (inconsistent) constant

  // method / training
  std::vector<MethodKind> methods = {MethodKind::original, MethodKind::optimal_weight,
                                     MethodKind::magnitude_normalization};
  std::vector<int> hidden = {20, 20, 20, 20};
  int iterations = 5000;
  Eigen::Index initial_interior = 2;
  Eigen::Index initial_boundary = 2;
  /// Adaptive growth ceilings (0: unlimited).  Overfit-prone runs double
  /// until training and validation agree, which on bad seeds never happens;
  /// the ceilings bound their memory and per-iteration cost.  Defaults sit
  /// 2-8x above the counts healthy desk-scale runs settle at.
  Eigen::Index max_interior = 16384;
  Eigen::Index max_boundary = 4096;
  double q = 5.0;              ///< validation/train doubling trigger ratio
  int adaptive_interval = 100; ///< iterations between adaptive checks
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  double p = 2.0;
  LambdaMode lambda_mode = LambdaMode::closed_form;  ///< closed form preferred, MC fallback
  OptimizerKind optimizer = OptimizerKind::lbfgs;
  int history = 10;
  double adam_step = 1e-3;
  double grad_tolerance = 0.0;  ///< 0: train for the full iteration budget

  // evaluation / output
  int eval_resolution = 101;
  std::string out;         ///< results path; empty = stdout
  OutputFormat format = OutputFormat::csv;
  std::string params_out;  ///< prefix for per-run parameter files (optional)
  std::string trace_out;   ///< prefix for per-run trace CSVs (optional)

  void validate() const;  ///< throws std::invalid_argument
};

/// Parses the flat `key = value` config format ('#' comments, one key per
/// line, lists separated by spaces or commas).  Unknown or duplicate keys
/// are errors.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Instantiates the configured problem factory (also resolving `dim`).
LinearPDEProblem build_problem(const ExperimentConfig& config);

/// One trained run; everything the CSV/JSON emitters report plus the trained
/// parameters and the full trace.
struct ResultRecord {
  std::string problem;
  MethodKind method = MethodKind::original;
  std::uint64_t seed = 0;
  double omega_or_alpha = 0.0;
  int dim = 0;
  double rel_l2 = 0.0;
  double rel_linf = 0.0;
  Eigen::Index n_interior = 0;
  Eigen::Index n_boundary = 0;
  int iterations = 0;
  double wall_seconds = 0.0;
  double lambda = std::numeric_limits<double>::quiet_NaN();  ///< optimal_weight only
  LossBreakdown final_loss;
  TerminationReason reason = TerminationReason::max_iterations;
  Eigen::VectorXd params;
  TrainingTrace trace;
};

/// Relative L2 and Linf errors of the network against the analytic solution
/// over the columns of eval_points.  Throws when the exact solution vanishes
/// identically on the set.
std::pair<double, double> relative_errors(const TanhNetwork& net, const Eigen::VectorXd& params,
                                          const JetField& solution,
                                          const Eigen::MatrixXd& eval_points);

/// Error-measurement points: dim <= 3 a tensor grid with `resolution` points
/// per axis including both endpoints; dim > 3 10^5 Monte-Carlo points from
/// the fixed seed.
Eigen::MatrixXd build_eval_points(int dim, int resolution,
                                  std::uint64_t seed = 0x45AFC7E11D2ULL);

/// Runs every (method, seed) combination of the config and returns one
/// record per run, in (method-major, seed-minor) order.
std::vector<ResultRecord> run_experiment(const ExperimentConfig& config);

/// CSV columns: problem,method,seed,omega_or_alpha,dim,rel_l2,rel_linf,
/// n_interior,n_boundary,iterations,wall_seconds.  JSON mirrors the record's
/// reported fields (adding lambda, reason, and the final loss breakdown).
void emit_results(const std::vector<ResultRecord>& records, OutputFormat format,
                  std::ostream& out);
void emit_results(const std::vector<ResultRecord>& records, OutputFormat format,
                  const std::string& path);

/// Training-trace CSV: iteration,train_interior,train_boundary,
/// validation_interior,validation_boundary,total,n_interior,n_boundary,
/// wall_seconds.
void write_trace_csv(const TrainingTrace& trace, std::ostream& out);

/// Sampled field CSV with rows x1,...,xd,u_hat,u_exact,abs_error over
/// build_eval_points(dim, resolution).
void dump_field(const TanhNetwork& net, const Eigen::VectorXd& params, const JetField& solution,
                int dim, int resolution, std::ostream& out);
void dump_field(const TanhNetwork& net, const Eigen::VectorXd& params, const JetField& solution,
                int dim, int resolution, const std::string& path);

/// Text persistence of a trained parameter vector with an architecture and
/// seed header.
struct SavedParameters {
  NetworkArchitecture arch;
  std::uint64_t seed = 0;
  Eigen::VectorXd params;
};
void save_parameters(const std::string& path, const NetworkArchitecture& arch,
                     std::uint64_t seed, const Eigen::VectorXd& params);
SavedParameters load_parameters(const std::string& path);

}  // namespace wpinn
