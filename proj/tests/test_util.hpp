// Shared helpers for the unit and acceptance tests: independent
// finite-difference oracles and small random fixtures.  Everything here is
// deliberately written with plain loops so it cannot share bugs with the
// library's vectorized implementations.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "wpinn/network.hpp"
#include "wpinn/pde_problem.hpp"

namespace wpinn::testutil {

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

/// Central-difference gradient with per-component step h*max(1,|x_i|).
inline Eigen::VectorXd fd_gradient(const ScalarFn& f, const Eigen::VectorXd& x,
                                   double h = 6e-6) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x(i)));
    const double xi = x(i);
    probe(i) = xi + step;
    const double fp = f(probe);
    probe(i) = xi - step;
    const double fm = f(probe);
    probe(i) = xi;
    g(i) = (fp - fm) / (2.0 * step);
  }
  return g;
}

/// Worst component mismatch between gradients `a` and `b`, measured as
/// |a_i - b_i| / max(rel_tol * max(|a_i|, |b_i|), abs_tol); <= 1 passes.
inline double gradient_mismatch(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                double rel_tol = 1e-6, double abs_tol = 1e-9) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double err = std::abs(a(i) - b(i));
    const double allow = std::max(rel_tol * std::max(std::abs(a(i)), std::abs(b(i))), abs_tol);
    worst = std::max(worst, err / allow);
  }
  return worst;
}

/// First derivative of f along axis i by central differences.
inline double fd_first(const ScalarFn& f, const Eigen::VectorXd& x, int i, double h = 5e-6) {
  Eigen::VectorXd p = x;
  p(i) = x(i) + h;
  const double fp = f(p);
  p(i) = x(i) - h;
  const double fm = f(p);
  return (fp - fm) / (2.0 * h);
}

/// Second derivative of f along axes (i, j) by central differences.
inline double fd_second(const ScalarFn& f, const Eigen::VectorXd& x, int i, int j,
                        double h = 2e-4) {
  Eigen::VectorXd p = x;
  if (i == j) {
    const double f0 = f(x);
    p(i) = x(i) + h;
    const double fp = f(p);
    p(i) = x(i) - h;
    const double fm = f(p);
    return (fp - 2.0 * f0 + fm) / (h * h);
  }
  p(i) = x(i) + h;
  p(j) = x(j) + h;
  const double fpp = f(p);
  p(j) = x(j) - h;
  const double fpm = f(p);
  p(i) = x(i) - h;
  const double fmm = f(p);
  p(j) = x(j) + h;
  const double fmp = f(p);
  return (fpp - fpm - fmp + fmm) / (4.0 * h * h);
}

/// Relative error with a scale floor: |a-b| / max(|a|, |b|, floor).
inline double rel_err(double a, double b, double floor_scale = 1e-3) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor_scale});
}

/// Reference forward pass written with plain scalar loops: affine layers with
/// tanh activations, affine output.  Parameters are laid out per
/// ParameterLayout (weights row-major per layer, then biases).
inline double plain_forward(const NetworkArchitecture& arch, const Eigen::VectorXd& params,
                            const Eigen::VectorXd& x) {
  const ParameterLayout layout(arch);
  std::vector<double> in(x.data(), x.data() + x.size());
  const int layers = arch.layer_count();
  for (int layer = 0; layer < layers; ++layer) {
    const int rows = arch.layer_outputs(layer);
    const int cols = arch.layer_inputs(layer);
    std::vector<double> out(static_cast<std::size_t>(rows), 0.0);
    for (int r = 0; r < rows; ++r) {
      double acc = params(layout.bias_offset(layer) + r);
      for (int c = 0; c < cols; ++c) {
        acc += params(layout.weight_offset(layer) + static_cast<Eigen::Index>(r) * cols + c) *
               in[static_cast<std::size_t>(c)];
      }
      out[static_cast<std::size_t>(r)] = acc;
    }
    if (layer + 1 < layers) {
      for (double& v : out) v = std::tanh(v);
    }
    in = std::move(out);
  }
  return in[0];
}

/// A throwaway parameter vector: Glorot initialization roughened by a
/// deterministic multiplicative jitter so derivatives are not tiny.
inline Eigen::VectorXd rough_params(const NetworkArchitecture& arch, std::uint64_t seed,
                                    double scale = 1.5) {
  Eigen::VectorXd params = glorot_init(arch, seed);
  std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ULL);
  std::uniform_real_distribution<double> jitter(0.5, 1.5);
  for (Eigen::Index i = 0; i < params.size(); ++i) params(i) *= scale * jitter(rng);
  return params;
}

inline Eigen::VectorXd random_point(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x(i) = uniform(rng);
  return x;
}

/// Rescales the interior equation by c1 (operator coefficients and source)
/// and the boundary equation by c2 (coefficients and data).  The solution
/// field is untouched and any closed-form magnitude bounds are scaled to
/// match (|c|^p with p = 2).
inline LinearPDEProblem scale_problem(const LinearPDEProblem& base, double c1, double c2) {
  LinearPDEProblem scaled = base;
  for (OperatorTerm& term : scaled.interior_terms) {
    term.coefficient = [c1, inner = term.coefficient](const Eigen::VectorXd& x) {
      return c1 * inner(x);
    };
  }
  scaled.source = [c1, inner = base.source](const Eigen::VectorXd& x) { return c1 * inner(x); };
  for (OperatorTerm& term : scaled.boundary_terms) {
    term.coefficient = [c2, inner = term.coefficient](const Eigen::VectorXd& x) {
      return c2 * inner(x);
    };
  }
  scaled.boundary_data = [c2, inner = base.boundary_data](const Eigen::VectorXd& x) {
    return c2 * inner(x);
  };
  if (scaled.closed_form_bounds) {
    scaled.closed_form_bounds->interior *= c1 * c1;
    scaled.closed_form_bounds->boundary *= c2 * c2;
  }
  return scaled;
}

}  // namespace wpinn::testutil
