#pragma once

#include <Eigen/Core>

#include <optional>
#include <stdexcept>

#include "wpinn/network.hpp"
#include "wpinn/objective.hpp"
#include "wpinn/pde_problem.hpp"

namespace wpinn {

enum class LossKind { original, optimal_weight, magnitude_normalized };

/// Which total-loss assembly to train with, plus its constants.
struct LossStrategy {
  LossKind kind = LossKind::original;
  double p = 2.0;
  std::optional<double> lambda;  ///< required for optimal_weight, in (0,1)
  /// Precomputed sum of |G(x)|^p over the boundary collocation set (the
  /// Dirichlet stabilization of the magnitude-normalized denominator).
  std::optional<double> boundary_denominator;
  double interior_floor = 1e-30;  ///< guards the interior denominator

  /// Throws std::invalid_argument when constants are inconsistent with kind.
  /// `require_denominator` additionally demands boundary_denominator be set
  /// (the evaluator fills it from the point set, so it may be absent early).
  void validate(bool require_denominator = false) const;

  static LossStrategy original(double p = 2.0);
  static LossStrategy optimal_weight(double lambda, double p = 2.0);
  static LossStrategy magnitude_normalized(double p = 2.0);
};

/// One total-loss evaluation, split into reusable pieces.  For every
/// strategy,  total == interior / interior_denominator
///                   + boundary / boundary_denominator
/// holds exactly as written (the denominators fold in the strategy's weights
/// and the sum-vs-mean normalization), so the assembly is recomputable.
struct LossBreakdown {
  double interior = 0.0;               ///< L_I: mean of |interior residual|^p
  double boundary = 0.0;               ///< L_B: mean of |boundary residual|^p
  double interior_denominator = 1.0;
  double boundary_denominator = 1.0;
  double total = 0.0;
  double log_total = 0.0;              ///< -inf when total == 0
};

/// Thrown when magnitude normalization is requested but the boundary data
/// vanishes on the whole collocation set; the normalized functional is
/// degenerate there (its denominator would be zero and the trivial function
/// could zero the loss while violating the boundary conditions).
class HomogeneousBoundaryError : public std::runtime_error {
 public:
  explicit HomogeneousBoundaryError(const std::string& what) : std::runtime_error(what) {}
};

/// Mean of |interior residual|^p over the columns of `points` (dim x n).
double interior_loss(const LinearPDEProblem& problem, const TanhNetwork& net,
                     const Eigen::VectorXd& params, const Eigen::MatrixXd& points, double p);

/// Mean of |boundary residual|^p over the columns of `points`.
double boundary_loss(const LinearPDEProblem& problem, const TanhNetwork& net,
                     const Eigen::VectorXd& params, const Eigen::MatrixXd& points, double p);

/// L = L_I + L_B.
double total_original(double interior, double boundary);

/// L = |Omega| lambda L_I + |bdOmega| (1-lambda) L_B;  lambda must be in (0,1).
double total_weighted(double interior, double boundary, double lambda, double domain_measure,
                      double boundary_measure);

/// Sum of |G(x)|^p over the columns of `points`; throws
/// HomogeneousBoundaryError when the sum vanishes.
double boundary_magnitude_denominator(const LinearPDEProblem& problem,
                                      const Eigen::MatrixXd& points, double p);

/// Magnitude-normalized total
///   L = sum |r_I|^p / max(sum (Sum_j |a_j d^b_j u| + |F|)^p, floor)
///     + sum |r_B|^p / boundary_denominator,
/// with the boundary denominator precomputed (strategy.boundary_denominator
/// must be set and positive).
LossBreakdown total_magnitude_normalized(const LinearPDEProblem& problem, const TanhNetwork& net,
                                         const Eigen::VectorXd& params,
                                         const Eigen::MatrixXd& interior_points,
                                         const Eigen::MatrixXd& boundary_points, double p,
                                         const LossStrategy& strategy);

/// Natural log of a positive total.  total == 0 throws ZeroLossSignal
/// (converged, not broken); total < 0 throws std::invalid_argument.
double log_objective(double total);

/// Residual vectors over a batch of points (one entry per column), computed
/// through the batched jet evaluator.
Eigen::VectorXd interior_residuals(const LinearPDEProblem& problem, const TanhNetwork& net,
                                   const Eigen::VectorXd& params, const Eigen::MatrixXd& points);
Eigen::VectorXd boundary_residuals(const LinearPDEProblem& problem, const TanhNetwork& net,
                                   const Eigen::VectorXd& params, const Eigen::MatrixXd& points);

/// Caches everything about a (problem, strategy, collocation set) triple that
/// does not depend on the parameters — coefficient values, F, G, the
/// boundary denominator — and evaluates the log-loss and its exact gradient
/// with reused tapes.  This is the training-time path; the free functions
/// above are the simple reference path.
class LossEvaluator {
 public:
  LossEvaluator(LinearPDEProblem problem, NetworkArchitecture arch, LossStrategy strategy);

  /// Replaces the collocation set (columns = points).  Recomputes the cached
  /// coefficient/F/G tables and, for magnitude normalization, the boundary
  /// denominator (throwing HomogeneousBoundaryError if it vanishes).
  void set_points(const Eigen::MatrixXd& interior, const Eigen::MatrixXd& boundary);

  Eigen::Index interior_count() const { return interior_points_.cols(); }
  Eigen::Index boundary_count() const { return boundary_points_.cols(); }
  const LossStrategy& strategy() const { return strategy_; }
  const LinearPDEProblem& problem() const { return problem_; }
  const TanhNetwork& network() const { return net_; }

  /// Loss at `params` (no gradient).  A zero total is reported with
  /// log_total = -infinity rather than thrown.
  const LossBreakdown& evaluate(const Eigen::VectorXd& params);

  /// Loss and d(log total)/d(params).  Throws ZeroLossSignal when the total
  /// is exactly zero (the gradient of the log transform is undefined there).
  const LossBreakdown& evaluate(const Eigen::VectorXd& params, Eigen::VectorXd& grad);

  const LossBreakdown& last_breakdown() const { return breakdown_; }

  /// The log-loss as a minimizable objective (value = log total).
  Objective as_log_objective();

 private:
  struct TermCache {
    Eigen::ArrayXd coeff;  // coefficient values over the point set
    int kind = 0;          // 0 = value, 1 = first, 2 = second
    int row = 0;           // row into the corresponding JetBatch block
  };
  struct SideCache {
    Eigen::MatrixXd* points = nullptr;
    std::vector<TermCache> terms;
    Eigen::ArrayXd data;  // F or G over the point set
    int order = 0;        // max derivative order demanded by the terms
  };

  void build_side(SideCache& side, const std::vector<OperatorTerm>& terms,
                  const ScalarField& data, const Eigen::MatrixXd& points);
  const LossBreakdown& evaluate_impl(const Eigen::VectorXd& params, Eigen::VectorXd* grad);
  Eigen::ArrayXd residuals(const SideCache& side, const JetBatch& jets) const;
  Eigen::ArrayXd side_magnitude(const SideCache& side, const JetBatch& jets) const;

  LinearPDEProblem problem_;
  TanhNetwork net_;
  LossStrategy strategy_;
  Eigen::MatrixXd interior_points_;
  Eigen::MatrixXd boundary_points_;
  SideCache interior_;
  SideCache boundary_;
  JetTape interior_tape_;
  JetTape boundary_tape_;
  LossBreakdown breakdown_;
};

}  // namespace wpinn
