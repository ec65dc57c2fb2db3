#pragma once

#include <Eigen/Core>

#include <functional>
#include <limits>
#include <vector>

#include "wpinn/objective.hpp"

namespace wpinn {

struct LBFGSConfig {
  int history = 10;                ///< stored curvature pairs m
  int max_iterations = 100;
  double wolfe_c1 = 1e-4;          ///< sufficient-decrease constant
  double wolfe_c2 = 0.9;           ///< curvature constant, c1 < c2 < 1
  double grad_tolerance = 1e-12;   ///< stop when the gradient 2-norm drops below
  int max_line_search_steps = 30;  ///< objective evaluations per line search

  void validate() const;  ///< throws std::invalid_argument on bad constants
};

struct AdamConfig {
  double step_size = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_iterations = 100;
  double grad_tolerance = 0.0;  ///< 0 disables the gradient stop

  void validate() const;
};

enum class TerminationReason {
  max_iterations,
  gradient_tolerance,
  line_search_failed,
  callback_stop,
  zero_loss,  ///< objective signalled an exact zero loss (perfect minimizer)
};

const char* to_string(TerminationReason reason);

/// One row of the training trace.  The optimizer fills iteration, total
/// (the raw objective value) and wall_seconds; training drivers overwrite
/// total with the actual loss and fill the loss-component and point-count
/// columns from their evaluators.  Unfilled columns stay NaN (or 0 counts).
struct TraceRow {
  int iteration = 0;
  double train_interior = std::numeric_limits<double>::quiet_NaN();
  double train_boundary = std::numeric_limits<double>::quiet_NaN();
  double validation_interior = std::numeric_limits<double>::quiet_NaN();
  double validation_boundary = std::numeric_limits<double>::quiet_NaN();
  double total = std::numeric_limits<double>::quiet_NaN();
  Eigen::Index n_interior = 0;
  Eigen::Index n_boundary = 0;
  double wall_seconds = 0.0;
};

struct TrainingTrace {
  std::vector<TraceRow> rows;
};

/// What the per-iteration callback wants the optimizer to do next.
enum class CallbackAction {
  proceed,
  reset_history,  ///< objective changed (e.g. new collocation points): drop
                  ///< curvature state and re-evaluate at the current iterate
  stop,
};

/// Snapshot handed to the callback after each accepted iteration.
struct IterationInfo {
  int iteration = 0;  ///< 1-based count of completed iterations
  const Eigen::VectorXd& params;
  double objective = 0.0;
  double gradient_norm = 0.0;
  double step_length = 0.0;
  int function_evaluations = 0;  ///< cumulative objective evaluations
};

/// Returns the action to take; may annotate the trace row in place.
using OptimizeCallback = std::function<CallbackAction(const IterationInfo&, TraceRow&)>;

struct OptimizeResult {
  Eigen::VectorXd params;
  double objective = std::numeric_limits<double>::quiet_NaN();
  TerminationReason reason = TerminationReason::max_iterations;
  int iterations = 0;
  int function_evaluations = 0;
  /// Accepted steps that failed the strong-Wolfe check (fallback acceptances
  /// after bracket collapse); 0 on healthy runs.
  int wolfe_violations = 0;
  TrainingTrace trace;
};

/// Curvature-pair store with the standard two-loop recursion.  Pairs with
/// s'y <= 1e-10 ||s|| ||y|| are rejected to keep the implicit inverse Hessian
/// positive definite.
class LbfgsHistory {
 public:
  explicit LbfgsHistory(int capacity);

  void clear();
  /// Returns false when the pair was rejected by the curvature guard.
  bool push(const Eigen::VectorXd& s, const Eigen::VectorXd& y);
  int size() const { return static_cast<int>(pairs_.size()); }

  /// r = H_k * v with H_0 = gamma I, gamma = s'y / y'y of the newest pair
  /// (identity when empty).
  Eigen::VectorXd apply_inverse_hessian(const Eigen::VectorXd& v) const;

 private:
  struct Pair {
    Eigen::VectorXd s;
    Eigen::VectorXd y;
    double rho = 0.0;
  };
  int capacity_;
  std::vector<Pair> pairs_;  // oldest first
};

/// L-BFGS with a strong-Wolfe bracketing/zoom line search (cubic Hermite
/// interpolation).  The callback runs after every accepted iteration.
/// Non-finite trial values during the line search shrink the step; a
/// non-finite objective at x0 throws NonFiniteObjectiveError.  A
/// ZeroLossSignal from the objective terminates with reason zero_loss and
/// the signalling iterate as params.
OptimizeResult lbfgs_minimize(const Objective& objective, Eigen::VectorXd x0,
                              const LBFGSConfig& config, const OptimizeCallback& callback = {});

/// Bias-corrected Adam with the same callback contract (reset_history clears
/// the moment estimates and re-evaluates).
OptimizeResult adam_minimize(const Objective& objective, Eigen::VectorXd x0,
                             const AdamConfig& config, const OptimizeCallback& callback = {});

}  // namespace wpinn
