#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpinn/network.hpp"

namespace wpinn {

/// Partial-derivative orders, one entry per coordinate; |beta| = sum.
struct MultiIndex {
  std::vector<int> orders;

  int total_order() const;
  void validate(int dim) const;  ///< non-negative entries, |beta| <= 2, right length

  static MultiIndex value(int dim);              ///< all zeros (identity)
  static MultiIndex d1(int dim, int i);          ///< first derivative in x_i
  static MultiIndex d2(int dim, int i, int j);   ///< second derivative d2/dx_i dx_j

  bool operator==(const MultiIndex&) const = default;
};

/// The jet's entry selected by a multi-index.  Throws std::invalid_argument
/// when the jet does not carry the requested order.
double jet_partial(const Jet& jet, const MultiIndex& index);

using ScalarField = std::function<double(const Eigen::VectorXd&)>;
using JetField = std::function<Jet(const Eigen::VectorXd&)>;

/// One additive term of a linear differential operator:
/// coefficient(x) * d^index u(x).
struct OperatorTerm {
  ScalarField coefficient;
  MultiIndex index;
};

/// Exact magnitude bounds M_I, M_B of a solution (closed form or Monte-Carlo).
struct MagnitudeBounds {
  double interior = 0.0;   ///< M_I
  double boundary = 0.0;   ///< M_B
  double p = 2.0;          ///< norm exponent the bounds were computed for
};

/// Linear boundary-value problem on the unit hypercube (0,1)^d:
///   interior:  sum_j a_j(x) d^{b_j} u(x) = F(x)   in Omega
///   boundary:  sum_j c_j(x) d^{g_j} u(x) = G(x)   on the boundary
/// (a single identity boundary term is a Dirichlet condition).
struct LinearPDEProblem {
  int dim = 1;
  std::vector<OperatorTerm> interior_terms;
  ScalarField source;                         ///< F
  std::vector<OperatorTerm> boundary_terms;
  ScalarField boundary_data;                  ///< G
  JetField solution;                          ///< analytic solution with jets (may be empty)
  std::optional<MagnitudeBounds> closed_form_bounds;  ///< exact M_I, M_B at p=2 when known
  std::string name;
  double parameter = 0.0;  ///< the problem's headline parameter (omega or alpha)

  double domain_measure() const { return 1.0; }
  double boundary_measure() const { return 2.0 * dim; }
  int max_interior_order() const;
  int max_boundary_order() const;

  /// Structural validation: at least one term per side, indices within
  /// bounds, |beta| <= 2.  Throws std::invalid_argument.
  void validate() const;
};

/// Verifies that the problem's analytic solution actually solves it:
/// |interior residual| <= tol at n random interior points.  Factories call
/// this at construction.  Throws std::logic_error on violation, or
/// std::invalid_argument when no solution is attached.
void check_solution_consistency(const LinearPDEProblem& problem, int n = 100,
                                double tol = 1e-9, std::uint64_t seed = 0x5EEDC0DEULL);

/// Interior residual  sum_j a_j(x) * (jet at b_j) - F(x).
double interior_residual(const LinearPDEProblem& problem, const Jet& jet,
                         const Eigen::VectorXd& x);

/// Boundary residual  sum_j c_j(x) * (jet at g_j) - G(x).
double boundary_residual(const LinearPDEProblem& problem, const Jet& jet,
                         const Eigen::VectorXd& x);

/// Interior magnitude integrand  [sum_j |a_j(x) * (jet at b_j)| (+|F(x)|)]^p.
/// The |F| term enters the magnitude-normalization denominator but is
/// excluded when estimating M_I for the optimal weight.
double magnitude_integrand_interior(const LinearPDEProblem& problem, const Jet& jet,
                                    const Eigen::VectorXd& x, double p, bool include_source);

/// Boundary magnitude integrand  [sum_j |c_j(x) * (jet at g_j)|]^p; reduces
/// to |u(x)|^p for Dirichlet problems.
double magnitude_integrand_boundary(const LinearPDEProblem& problem, const Jet& jet,
                                    const Eigen::VectorXd& x, double p);

/// Monte-Carlo magnitude bounds of a candidate function:
///   M_I ~ |Omega|   * mean interior integrand over n_interior uniform samples
///   M_B ~ |bdOmega| * mean boundary integrand over n_boundary samples.
/// Deterministic given the rng state.
MagnitudeBounds estimate_magnitude_bounds(const LinearPDEProblem& problem,
                                          const JetField& candidate, std::mt19937_64& rng,
                                          Eigen::Index n_interior, Eigen::Index n_boundary,
                                          double p, bool include_source);

/// Thrown when both magnitude bounds vanish and no weight can be derived.
class DegenerateMagnitudeError : public std::runtime_error {
 public:
  explicit DegenerateMagnitudeError(const std::string& what) : std::runtime_error(what) {}
};

/// Optimal loss weight  lambda = M_B / (M_I + M_B), in (0,1).
double optimal_lambda(const MagnitudeBounds& bounds);

/// The conventional weight  |bdOmega| / (|bdOmega| + |Omega|).
double lambda_original(const LinearPDEProblem& problem);

/// Theorem-1 bound: loss below delta implies the candidate is epsilon-close,
///   delta = eps^p * [C * (c1^{-1/p} |Omega|^{1-1/p} + c2^{-1/p} |bdOmega|^{1-1/p})]^{-p}.
/// All inputs must be positive and p >= 1.
double delta_bound(double epsilon, double p, double lipschitz_c, double interior_measure,
                   double boundary_measure, double c1, double c2);

}  // namespace wpinn
