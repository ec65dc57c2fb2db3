#include "wpinn/pde_problem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wpinn/sampling.hpp"

namespace wpinn {

int MultiIndex::total_order() const {
  return std::accumulate(orders.begin(), orders.end(), 0);
}

void MultiIndex::validate(int dim) const {
  if (static_cast<int>(orders.size()) != dim) {
    throw std::invalid_argument("MultiIndex: expected " + std::to_string(dim) +
                                " entries, got " + std::to_string(orders.size()));
  }
  for (int o : orders) {
    if (o < 0) throw std::invalid_argument("MultiIndex: negative derivative order");
  }
  if (total_order() > 2) {
    throw std::invalid_argument("MultiIndex: total order " + std::to_string(total_order()) +
                                " exceeds the supported maximum of 2");
  }
}

MultiIndex MultiIndex::value(int dim) { return MultiIndex{std::vector<int>(dim, 0)}; }

MultiIndex MultiIndex::d1(int dim, int i) {
  MultiIndex m{std::vector<int>(dim, 0)};
  m.orders.at(i) = 1;
  return m;
}

MultiIndex MultiIndex::d2(int dim, int i, int j) {
  MultiIndex m{std::vector<int>(dim, 0)};
  m.orders.at(i) += 1;
  m.orders.at(j) += 1;
  return m;
}

double jet_partial(const Jet& jet, const MultiIndex& index) {
  const int dim = static_cast<int>(jet.first.size());
  index.validate(dim);
  const int total = index.total_order();
  if (total > jet.order) {
    throw std::invalid_argument("jet_partial: jet of order " + std::to_string(jet.order) +
                                " cannot supply a derivative of order " + std::to_string(total));
  }
  if (total == 0) return jet.value;
  if (total == 1) {
    for (int i = 0; i < dim; ++i) {
      if (index.orders[i] == 1) return jet.first(i);
    }
  }
  // total == 2: either one coordinate squared or two distinct coordinates.
  int first = -1, second = -1;
  for (int i = 0; i < dim; ++i) {
    if (index.orders[i] == 2) return jet.second(i, i);
    if (index.orders[i] == 1) (first < 0 ? first : second) = i;
  }
  return jet.second(first, second);
}

int LinearPDEProblem::max_interior_order() const {
  int order = 0;
  for (const auto& term : interior_terms) order = std::max(order, term.index.total_order());
  return order;
}

int LinearPDEProblem::max_boundary_order() const {
  int order = 0;
  for (const auto& term : boundary_terms) order = std::max(order, term.index.total_order());
  return order;
}

void LinearPDEProblem::validate() const {
  if (dim < 1) throw std::invalid_argument("LinearPDEProblem: dim must be >= 1");
  if (interior_terms.empty()) {
    throw std::invalid_argument("LinearPDEProblem: no interior operator terms");
  }
  if (boundary_terms.empty()) {
    throw std::invalid_argument("LinearPDEProblem: no boundary operator terms");
  }
  if (!source) throw std::invalid_argument("LinearPDEProblem: missing source F");
  if (!boundary_data) throw std::invalid_argument("LinearPDEProblem: missing boundary data G");
  for (const auto& term : interior_terms) {
    if (!term.coefficient) throw std::invalid_argument("LinearPDEProblem: null coefficient");
    term.index.validate(dim);
  }
  for (const auto& term : boundary_terms) {
    if (!term.coefficient) throw std::invalid_argument("LinearPDEProblem: null coefficient");
    term.index.validate(dim);
  }
}

namespace {

double apply_terms(const std::vector<OperatorTerm>& terms, const Jet& jet,
                   const Eigen::VectorXd& x) {
  double acc = 0.0;
  for (const auto& term : terms) acc += term.coefficient(x) * jet_partial(jet, term.index);
  return acc;
}

double apply_terms_abs(const std::vector<OperatorTerm>& terms, const Jet& jet,
                       const Eigen::VectorXd& x) {
  double acc = 0.0;
  for (const auto& term : terms) {
    acc += std::abs(term.coefficient(x) * jet_partial(jet, term.index));
  }
  return acc;
}

}  // namespace

double interior_residual(const LinearPDEProblem& problem, const Jet& jet,
                         const Eigen::VectorXd& x) {
  return apply_terms(problem.interior_terms, jet, x) - problem.source(x);
}

double boundary_residual(const LinearPDEProblem& problem, const Jet& jet,
                         const Eigen::VectorXd& x) {
  return apply_terms(problem.boundary_terms, jet, x) - problem.boundary_data(x);
}

double magnitude_integrand_interior(const LinearPDEProblem& problem, const Jet& jet,
                                    const Eigen::VectorXd& x, double p, bool include_source) {
  double acc = apply_terms_abs(problem.interior_terms, jet, x);
  if (include_source) acc += std::abs(problem.source(x));
  return std::pow(acc, p);
}

double magnitude_integrand_boundary(const LinearPDEProblem& problem, const Jet& jet,
                                    const Eigen::VectorXd& x, double p) {
  return std::pow(apply_terms_abs(problem.boundary_terms, jet, x), p);
}

void check_solution_consistency(const LinearPDEProblem& problem, int n, double tol,
                                std::uint64_t seed) {
  problem.validate();
  if (!problem.solution) {
    throw std::invalid_argument("check_solution_consistency: problem has no analytic solution");
  }
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd interior = sample_interior(problem.dim, n, rng);
  const Eigen::MatrixXd boundary = sample_boundary(problem.dim, n, rng);
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd x = interior.col(k);
    const double r = interior_residual(problem, problem.solution(x), x);
    if (!(std::abs(r) <= tol)) {
      throw std::logic_error("check_solution_consistency: interior residual " +
                             std::to_string(r) + " exceeds tolerance for problem " +
                             problem.name);
    }
  }
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd x = boundary.col(k);
    const double r = boundary_residual(problem, problem.solution(x), x);
    if (!(std::abs(r) <= tol)) {
      throw std::logic_error("check_solution_consistency: boundary residual " +
                             std::to_string(r) + " exceeds tolerance for problem " +
                             problem.name);
    }
  }
}

MagnitudeBounds estimate_magnitude_bounds(const LinearPDEProblem& problem,
                                          const JetField& candidate, std::mt19937_64& rng,
                                          Eigen::Index n_interior, Eigen::Index n_boundary,
                                          double p, bool include_source) {
  problem.validate();
  if (!candidate) throw std::invalid_argument("estimate_magnitude_bounds: null candidate");
  if (n_interior < 1 || n_boundary < 1) {
    throw std::invalid_argument("estimate_magnitude_bounds: sample counts must be positive");
  }
  if (!(p >= 1.0)) throw std::invalid_argument("estimate_magnitude_bounds: p must be >= 1");

  const Eigen::MatrixXd interior = sample_interior(problem.dim, n_interior, rng);
  const Eigen::MatrixXd boundary = sample_boundary(problem.dim, n_boundary, rng);

  double sum_i = 0.0;
  for (Eigen::Index k = 0; k < n_interior; ++k) {
    const Eigen::VectorXd x = interior.col(k);
    sum_i += magnitude_integrand_interior(problem, candidate(x), x, p, include_source);
  }
  double sum_b = 0.0;
  for (Eigen::Index k = 0; k < n_boundary; ++k) {
    const Eigen::VectorXd x = boundary.col(k);
    sum_b += magnitude_integrand_boundary(problem, candidate(x), x, p);
  }

  MagnitudeBounds bounds;
  bounds.interior = problem.domain_measure() * sum_i / static_cast<double>(n_interior);
  bounds.boundary = problem.boundary_measure() * sum_b / static_cast<double>(n_boundary);
  bounds.p = p;
  return bounds;
}

double optimal_lambda(const MagnitudeBounds& bounds) {
  if (!(bounds.interior >= 0.0) || !(bounds.boundary >= 0.0)) {
    throw std::invalid_argument("optimal_lambda: magnitude bounds must be non-negative");
  }
  const double total = bounds.interior + bounds.boundary;
  if (total <= 0.0) {
    throw DegenerateMagnitudeError(
        "optimal_lambda: both magnitude bounds vanish; no weight can be derived");
  }
  return bounds.boundary / total;
}

double lambda_original(const LinearPDEProblem& problem) {
  const double interior = problem.domain_measure();
  const double boundary = problem.boundary_measure();
  return boundary / (boundary + interior);
}

double delta_bound(double epsilon, double p, double lipschitz_c, double interior_measure,
                   double boundary_measure, double c1, double c2) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("delta_bound: epsilon must be positive");
  if (!(p >= 1.0)) throw std::invalid_argument("delta_bound: p must be >= 1");
  if (!(lipschitz_c > 0.0)) throw std::invalid_argument("delta_bound: C must be positive");
  if (!(interior_measure > 0.0) || !(boundary_measure > 0.0)) {
    throw std::invalid_argument("delta_bound: measures must be positive");
  }
  if (!(c1 > 0.0) || !(c2 > 0.0)) {
    throw std::invalid_argument("delta_bound: stability constants must be positive");
  }
  const double interior_part =
      std::pow(c1, -1.0 / p) * std::pow(interior_measure, 1.0 - 1.0 / p);
  const double boundary_part =
      std::pow(c2, -1.0 / p) * std::pow(boundary_measure, 1.0 - 1.0 / p);
  const double bracket = lipschitz_c * (interior_part + boundary_part);
  return std::pow(epsilon, p) * std::pow(bracket, -p);
}

}  // namespace wpinn
