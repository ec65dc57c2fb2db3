#include "wpinn/model_problems.hpp"

#include <cmath>
#include <numbers>

namespace wpinn {

namespace {

constexpr double kPi = std::numbers::pi;

void require_pi_multiple(double omega, const char* what) {
  const double ratio = omega / kPi;
  if (!(omega > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-9 || std::round(ratio) < 1.0) {
    throw std::invalid_argument(std::string(what) + " must be a positive multiple of pi, got " +
                                std::to_string(omega));
  }
}

/// One separable factor f(x_i) together with its first two derivatives.
struct Factor {
  double value;
  double d1;
  double d2;
};

/// Order-2 jet of a product u(x) = prod_i f_i(x_i) from per-coordinate factors.
Jet separable_jet(const std::vector<Factor>& factors) {
  const int dim = static_cast<int>(factors.size());
  Jet jet;
  jet.order = 2;
  jet.first = Eigen::VectorXd::Zero(dim);
  jet.second = Eigen::MatrixXd::Zero(dim, dim);

  double product = 1.0;
  for (const auto& f : factors) product *= f.value;
  jet.value = product;

  // Products with one (or two) factors left out.  Recomputed per entry; the
  // dimensions in play are tiny, so clarity wins over caching.
  auto product_excluding = [&](int skip_a, int skip_b) {
    double acc = 1.0;
    for (int k = 0; k < dim; ++k) {
      if (k == skip_a || k == skip_b) continue;
      acc *= factors[k].value;
    }
    return acc;
  };

  for (int i = 0; i < dim; ++i) {
    jet.first(i) = factors[i].d1 * product_excluding(i, i);
    jet.second(i, i) = factors[i].d2 * product_excluding(i, i);
    for (int j = i + 1; j < dim; ++j) {
      const double mixed = factors[i].d1 * factors[j].d1 * product_excluding(i, j);
      jet.second(i, j) = mixed;
      jet.second(j, i) = mixed;
    }
  }
  return jet;
}

std::vector<OperatorTerm> laplacian_terms(int dim) {
  std::vector<OperatorTerm> terms;
  terms.reserve(dim);
  for (int i = 0; i < dim; ++i) {
    terms.push_back({[](const Eigen::VectorXd&) { return 1.0; }, MultiIndex::d2(dim, i, i)});
  }
  return terms;
}

std::vector<OperatorTerm> dirichlet_terms(int dim) {
  return {{[](const Eigen::VectorXd&) { return 1.0; }, MultiIndex::value(dim)}};
}

}  // namespace

LinearPDEProblem laplace_eigen(int dim, const std::vector<double>& frequencies) {
  if (dim < 2) throw std::invalid_argument("laplace_eigen: dim must be >= 2");
  if (static_cast<int>(frequencies.size()) != dim - 1) {
    throw std::invalid_argument("laplace_eigen: expected " + std::to_string(dim - 1) +
                                " frequencies (omega_2..omega_d), got " +
                                std::to_string(frequencies.size()));
  }
  for (double omega : frequencies) require_pi_multiple(omega, "laplace_eigen: frequency");

  double omega1_sq = 0.0;
  for (double omega : frequencies) omega1_sq += omega * omega;
  const double omega1 = std::sqrt(omega1_sq);

  auto solution_jet = [dim, omega1, frequencies](const Eigen::VectorXd& x) {
    std::vector<Factor> factors(dim);
    const double e = std::exp(-omega1 * x(0));
    factors[0] = {e, -omega1 * e, omega1 * omega1 * e};
    for (int i = 1; i < dim; ++i) {
      const double w = frequencies[i - 1];
      const double s = std::sin(w * x(i));
      const double c = std::cos(w * x(i));
      factors[i] = {s, w * c, -w * w * s};
    }
    return separable_jet(factors);
  };

  LinearPDEProblem problem;
  problem.dim = dim;
  problem.name = "laplace_eigen";
  problem.parameter = frequencies.front();
  problem.interior_terms = laplacian_terms(dim);
  problem.source = [](const Eigen::VectorXd&) { return 0.0; };
  problem.boundary_terms = dirichlet_terms(dim);
  problem.boundary_data = [solution_jet](const Eigen::VectorXd& x) {
    return solution_jet(x).value;
  };
  problem.solution = solution_jet;
  problem.closed_form_bounds = MagnitudeBounds{
      std::pow(2.0, 2 - dim) * omega1 * omega1 * omega1 * (1.0 - std::exp(-2.0 * omega1)),
      std::pow(2.0, 1 - dim) * (1.0 + std::exp(-2.0 * omega1)), 2.0};
  check_solution_consistency(problem);
  return problem;
}

LinearPDEProblem poisson_eigen(double omega) {
  require_pi_multiple(omega, "poisson_eigen: omega");
  const int dim = 2;

  auto solution_jet = [omega](const Eigen::VectorXd& x) {
    const double cx = std::cos(omega * x(0));
    const double sx = std::sin(omega * x(0));
    const double sy = std::sin(omega * x(1));
    const double cy = std::cos(omega * x(1));
    return separable_jet({{cx, -omega * sx, -omega * omega * cx},
                          {sy, omega * cy, -omega * omega * sy}});
  };

  LinearPDEProblem problem;
  problem.dim = dim;
  problem.name = "poisson_eigen";
  problem.parameter = omega;
  problem.interior_terms = laplacian_terms(dim);
  problem.source = [omega](const Eigen::VectorXd& x) {
    return -2.0 * omega * omega * std::cos(omega * x(0)) * std::sin(omega * x(1));
  };
  problem.boundary_terms = dirichlet_terms(dim);
  problem.boundary_data = [solution_jet](const Eigen::VectorXd& x) {
    return solution_jet(x).value;
  };
  problem.solution = solution_jet;
  problem.closed_form_bounds = MagnitudeBounds{omega * omega * omega * omega, 1.0, 2.0};
  check_solution_consistency(problem);
  return problem;
}

LinearPDEProblem poisson_peak() {
  const int dim = 2;
  constexpr double kSharpness = 1000.0;

  auto solution_jet = [](const Eigen::VectorXd& x) {
    const double dx = x(0) - 0.5;
    const double dy = x(1) - 0.5;
    const double g = std::exp(-kSharpness * (dx * dx + dy * dy));
    const double s = std::sin(kPi * x(0));

    Jet jet;
    jet.order = 2;
    jet.first = Eigen::VectorXd::Zero(2);
    jet.second = Eigen::MatrixXd::Zero(2, 2);
    jet.value = s + g - 0.5;
    jet.first(0) = kPi * std::cos(kPi * x(0)) - 2.0 * kSharpness * dx * g;
    jet.first(1) = -2.0 * kSharpness * dy * g;
    jet.second(0, 0) =
        -kPi * kPi * s + (4.0 * kSharpness * kSharpness * dx * dx - 2.0 * kSharpness) * g;
    jet.second(1, 1) = (4.0 * kSharpness * kSharpness * dy * dy - 2.0 * kSharpness) * g;
    jet.second(0, 1) = 4.0 * kSharpness * kSharpness * dx * dy * g;
    jet.second(1, 0) = jet.second(0, 1);
    return jet;
  };

  LinearPDEProblem problem;
  problem.dim = dim;
  problem.name = "poisson_peak";
  problem.parameter = 0.0;
  problem.interior_terms = laplacian_terms(dim);
  problem.source = [solution_jet](const Eigen::VectorXd& x) {
    const Jet jet = solution_jet(x);
    return jet.second(0, 0) + jet.second(1, 1);
  };
  problem.boundary_terms = dirichlet_terms(dim);
  problem.boundary_data = [solution_jet](const Eigen::VectorXd& x) {
    return solution_jet(x).value;
  };
  problem.solution = solution_jet;
  check_solution_consistency(problem);
  return problem;
}

LinearPDEProblem convection_diffusion(double v, double alpha, bool paper_constant) {
  if (!(alpha > 0.0)) throw std::invalid_argument("convection_diffusion: alpha must be > 0");
  if (!(v > 0.0)) throw std::invalid_argument("convection_diffusion: v must be > 0");
  const int dim = 1;

  const double rate = v / alpha;
  const double b = 1.0 / (1.0 - std::exp(-rate));
  const double a = paper_constant ? -0.5 : 0.5 - b;

  auto solution_jet = [a, b, rate](const Eigen::VectorXd& x) {
    const double e = b * std::exp(-rate * x(0));
    Jet jet;
    jet.order = 2;
    jet.first = Eigen::VectorXd::Zero(1);
    jet.second = Eigen::MatrixXd::Zero(1, 1);
    jet.value = a + e;
    jet.first(0) = -rate * e;
    jet.second(0, 0) = rate * rate * e;
    return jet;
  };

  LinearPDEProblem problem;
  problem.dim = dim;
  problem.name = "convection_diffusion";
  problem.parameter = alpha;
  problem.interior_terms = {
      {[alpha](const Eigen::VectorXd&) { return alpha; }, MultiIndex::d2(dim, 0, 0)},
      {[v](const Eigen::VectorXd&) { return v; }, MultiIndex::d1(dim, 0)}};
  problem.source = [](const Eigen::VectorXd&) { return 0.0; };
  problem.boundary_terms = dirichlet_terms(dim);
  problem.boundary_data = [](const Eigen::VectorXd& x) { return x(0) < 0.5 ? 0.5 : -0.5; };
  problem.solution = solution_jet;

  const double u0 = a + b;
  const double u1 = a + b * std::exp(-rate);
  problem.closed_form_bounds = MagnitudeBounds{
      2.0 * v * v * v / alpha * b * b * (1.0 - std::exp(-2.0 * rate)), u0 * u0 + u1 * u1, 2.0};
  // The paper-constant variant misses the boundary data by ~e^{-v/alpha} by
  // construction, so consistency is only checked for the corrected solution.
  if (!paper_constant) check_solution_consistency(problem);
  return problem;
}

}  // namespace wpinn
