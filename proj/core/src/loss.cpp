#include "wpinn/loss.hpp"

#include <cmath>
#include <limits>

namespace wpinn {

namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

Eigen::ArrayXd sign_array(const Eigen::ArrayXd& x) {
  return x.unaryExpr([](double v) { return sign_of(v); });
}

Eigen::ArrayXd abs_pow(const Eigen::ArrayXd& x, double p) {
  if (p == 2.0) return x.square();
  if (p == 1.0) return x.abs();
  return x.abs().pow(p);
}

/// d|x|^p/dx = p |x|^{p-1} sign(x), with the subgradient 0 at x = 0.
Eigen::ArrayXd abs_pow_derivative(const Eigen::ArrayXd& x, double p) {
  if (p == 2.0) return 2.0 * x;
  return p * abs_pow(x, p - 1.0) * sign_array(x);
}

void require_points(const Eigen::MatrixXd& points, int dim, const char* what) {
  if (points.cols() < 1) {
    throw std::invalid_argument(std::string(what) + ": empty point set");
  }
  if (points.rows() != dim) {
    throw std::invalid_argument(std::string(what) + ": points have " +
                                std::to_string(points.rows()) + " rows, problem dim is " +
                                std::to_string(dim));
  }
}

double mean_abs_residual_pow(const LinearPDEProblem& problem, const TanhNetwork& net,
                             const Eigen::VectorXd& params, const Eigen::MatrixXd& points,
                             double p, bool boundary) {
  require_points(points, problem.dim, boundary ? "boundary_loss" : "interior_loss");
  const int order = boundary ? problem.max_boundary_order() : problem.max_interior_order();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < points.cols(); ++k) {
    const Eigen::VectorXd x = points.col(k);
    const Jet jet = net.eval_jet(params, x, order);
    const double r =
        boundary ? boundary_residual(problem, jet, x) : interior_residual(problem, jet, x);
    acc += std::pow(std::abs(r), p);
  }
  return acc / static_cast<double>(points.cols());
}

}  // namespace

void LossStrategy::validate(bool require_denominator) const {
  if (!(p >= 1.0)) throw std::invalid_argument("LossStrategy: p must be >= 1");
  if (!(interior_floor > 0.0)) {
    throw std::invalid_argument("LossStrategy: interior_floor must be positive");
  }
  if (kind == LossKind::optimal_weight) {
    if (!lambda || !(*lambda > 0.0 && *lambda < 1.0)) {
      throw std::invalid_argument("LossStrategy: optimal_weight requires lambda in (0,1)");
    }
  }
  if (kind == LossKind::magnitude_normalized) {
    if (boundary_denominator && !(*boundary_denominator > 0.0)) {
      throw std::invalid_argument("LossStrategy: boundary_denominator must be positive");
    }
    if (require_denominator && !boundary_denominator) {
      throw std::invalid_argument(
          "LossStrategy: magnitude_normalized requires a precomputed boundary_denominator");
    }
  }
}

LossStrategy LossStrategy::original(double p) { return LossStrategy{LossKind::original, p}; }

LossStrategy LossStrategy::optimal_weight(double lambda, double p) {
  LossStrategy s{LossKind::optimal_weight, p};
  s.lambda = lambda;
  s.validate();
  return s;
}

LossStrategy LossStrategy::magnitude_normalized(double p) {
  return LossStrategy{LossKind::magnitude_normalized, p};
}

double interior_loss(const LinearPDEProblem& problem, const TanhNetwork& net,
                     const Eigen::VectorXd& params, const Eigen::MatrixXd& points, double p) {
  return mean_abs_residual_pow(problem, net, params, points, p, false);
}

double boundary_loss(const LinearPDEProblem& problem, const TanhNetwork& net,
                     const Eigen::VectorXd& params, const Eigen::MatrixXd& points, double p) {
  return mean_abs_residual_pow(problem, net, params, points, p, true);
}

double total_original(double interior, double boundary) { return interior + boundary; }

double total_weighted(double interior, double boundary, double lambda, double domain_measure,
                      double boundary_measure) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("total_weighted: lambda must lie in (0,1)");
  }
  if (!(domain_measure > 0.0) || !(boundary_measure > 0.0)) {
    throw std::invalid_argument("total_weighted: measures must be positive");
  }
  return domain_measure * lambda * interior + boundary_measure * (1.0 - lambda) * boundary;
}

double boundary_magnitude_denominator(const LinearPDEProblem& problem,
                                      const Eigen::MatrixXd& points, double p) {
  require_points(points, problem.dim, "boundary_magnitude_denominator");
  double acc = 0.0;
  for (Eigen::Index k = 0; k < points.cols(); ++k) {
    acc += std::pow(std::abs(problem.boundary_data(points.col(k))), p);
  }
  if (!(acc > 0.0)) {
    throw HomogeneousBoundaryError(
        "boundary data vanishes on the entire boundary collocation set; the "
        "magnitude-normalized loss is degenerate for homogeneous boundary conditions");
  }
  return acc;
}

LossBreakdown total_magnitude_normalized(const LinearPDEProblem& problem, const TanhNetwork& net,
                                         const Eigen::VectorXd& params,
                                         const Eigen::MatrixXd& interior_points,
                                         const Eigen::MatrixXd& boundary_points, double p,
                                         const LossStrategy& strategy) {
  strategy.validate(true);
  if (strategy.kind != LossKind::magnitude_normalized) {
    throw std::invalid_argument("total_magnitude_normalized: wrong strategy kind");
  }
  require_points(interior_points, problem.dim, "total_magnitude_normalized");
  require_points(boundary_points, problem.dim, "total_magnitude_normalized");

  const Eigen::Index n_i = interior_points.cols();
  const Eigen::Index n_b = boundary_points.cols();
  const int order_i = problem.max_interior_order();
  const int order_b = problem.max_boundary_order();

  double sum_ri = 0.0, sum_mag = 0.0;
  for (Eigen::Index k = 0; k < n_i; ++k) {
    const Eigen::VectorXd x = interior_points.col(k);
    const Jet jet = net.eval_jet(params, x, order_i);
    sum_ri += std::pow(std::abs(interior_residual(problem, jet, x)), p);
    sum_mag += magnitude_integrand_interior(problem, jet, x, p, /*include_source=*/true);
  }
  double sum_rb = 0.0;
  for (Eigen::Index k = 0; k < n_b; ++k) {
    const Eigen::VectorXd x = boundary_points.col(k);
    const Jet jet = net.eval_jet(params, x, order_b);
    sum_rb += std::pow(std::abs(boundary_residual(problem, jet, x)), p);
  }

  const double d_i = std::max(sum_mag, strategy.interior_floor);
  const double d_b = *strategy.boundary_denominator;

  LossBreakdown out;
  out.interior = sum_ri / static_cast<double>(n_i);
  out.boundary = sum_rb / static_cast<double>(n_b);
  out.interior_denominator = d_i / static_cast<double>(n_i);
  out.boundary_denominator = d_b / static_cast<double>(n_b);
  out.total = sum_ri / d_i + sum_rb / d_b;
  out.log_total =
      out.total > 0.0 ? std::log(out.total) : -std::numeric_limits<double>::infinity();
  return out;
}

double log_objective(double total) {
  if (total < 0.0) throw std::invalid_argument("log_objective: negative total");
  if (total == 0.0) throw ZeroLossSignal();
  return std::log(total);
}

Eigen::VectorXd interior_residuals(const LinearPDEProblem& problem, const TanhNetwork& net,
                                   const Eigen::VectorXd& params, const Eigen::MatrixXd& points) {
  require_points(points, problem.dim, "interior_residuals");
  const int order = problem.max_interior_order();
  Eigen::VectorXd r(points.cols());
  for (Eigen::Index k = 0; k < points.cols(); ++k) {
    const Eigen::VectorXd x = points.col(k);
    r(k) = interior_residual(problem, net.eval_jet(params, x, order), x);
  }
  return r;
}

Eigen::VectorXd boundary_residuals(const LinearPDEProblem& problem, const TanhNetwork& net,
                                   const Eigen::VectorXd& params, const Eigen::MatrixXd& points) {
  require_points(points, problem.dim, "boundary_residuals");
  const int order = problem.max_boundary_order();
  Eigen::VectorXd r(points.cols());
  for (Eigen::Index k = 0; k < points.cols(); ++k) {
    const Eigen::VectorXd x = points.col(k);
    r(k) = boundary_residual(problem, net.eval_jet(params, x, order), x);
  }
  return r;
}

LossEvaluator::LossEvaluator(LinearPDEProblem problem, NetworkArchitecture arch,
                             LossStrategy strategy)
    : problem_(std::move(problem)), net_(std::move(arch)), strategy_(strategy) {
  problem_.validate();
  strategy_.validate();
  if (net_.architecture().input_dim != problem_.dim) {
    throw std::invalid_argument("LossEvaluator: network input dim " +
                                std::to_string(net_.architecture().input_dim) +
                                " does not match problem dim " + std::to_string(problem_.dim));
  }
}

void LossEvaluator::build_side(SideCache& side, const std::vector<OperatorTerm>& terms,
                               const ScalarField& data, const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.cols();
  const int dim = problem_.dim;
  side.terms.clear();
  side.order = 0;
  for (const auto& term : terms) {
    term.index.validate(dim);
    TermCache cache;
    const int total = term.index.total_order();
    side.order = std::max(side.order, total);
    if (total == 0) {
      cache.kind = 0;
      cache.row = 0;
    } else if (total == 1) {
      cache.kind = 1;
      for (int i = 0; i < dim; ++i) {
        if (term.index.orders[i] == 1) cache.row = i;
      }
    } else {
      cache.kind = 2;
      int first = -1, second = -1;
      for (int i = 0; i < dim; ++i) {
        if (term.index.orders[i] == 2) first = second = i;
        if (term.index.orders[i] == 1) (first < 0 ? first : second) = i;
      }
      cache.row = sym_pair_index(first, second, dim);
    }
    cache.coeff.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) cache.coeff(k) = term.coefficient(points.col(k));
    side.terms.push_back(std::move(cache));
  }
  side.data.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) side.data(k) = data(points.col(k));
}

void LossEvaluator::set_points(const Eigen::MatrixXd& interior, const Eigen::MatrixXd& boundary) {
  require_points(interior, problem_.dim, "LossEvaluator::set_points(interior)");
  require_points(boundary, problem_.dim, "LossEvaluator::set_points(boundary)");
  interior_points_ = interior;
  boundary_points_ = boundary;
  build_side(interior_, problem_.interior_terms, problem_.source, interior_points_);
  build_side(boundary_, problem_.boundary_terms, problem_.boundary_data, boundary_points_);
  if (strategy_.kind == LossKind::magnitude_normalized) {
    strategy_.boundary_denominator =
        boundary_magnitude_denominator(problem_, boundary_points_, strategy_.p);
  }
}

namespace {

Eigen::ArrayXd channel_values(const JetBatch& jets, int kind, int row) {
  switch (kind) {
    case 0:
      return jets.value.transpose().array();
    case 1:
      return jets.first.row(row).transpose().array();
    default:
      return jets.second.row(row).transpose().array();
  }
}

void add_to_channel(JetSeeds& seeds, int kind, int row, const Eigen::ArrayXd& contribution) {
  switch (kind) {
    case 0:
      seeds.value += contribution.matrix().transpose();
      break;
    case 1:
      seeds.first.row(row) += contribution.matrix().transpose();
      break;
    default:
      seeds.second.row(row) += contribution.matrix().transpose();
      break;
  }
}

}  // namespace

Eigen::ArrayXd LossEvaluator::residuals(const SideCache& side, const JetBatch& jets) const {
  Eigen::ArrayXd r = -side.data;
  for (const auto& term : side.terms) {
    r += term.coeff * channel_values(jets, term.kind, term.row);
  }
  return r;
}

const LossBreakdown& LossEvaluator::evaluate(const Eigen::VectorXd& params) {
  return evaluate_impl(params, nullptr);
}

const LossBreakdown& LossEvaluator::evaluate(const Eigen::VectorXd& params,
                                             Eigen::VectorXd& grad) {
  return evaluate_impl(params, &grad);
}

const LossBreakdown& LossEvaluator::evaluate_impl(const Eigen::VectorXd& params,
                                                  Eigen::VectorXd* grad) {
  if (interior_points_.cols() == 0 || boundary_points_.cols() == 0) {
    throw std::logic_error("LossEvaluator: set_points must be called before evaluate");
  }
  const bool with_grad = grad != nullptr;
  const double p = strategy_.p;
  const auto n_i = static_cast<double>(interior_points_.cols());
  const auto n_b = static_cast<double>(boundary_points_.cols());

  const JetBatch jets_i =
      net_.eval_batch(params, interior_points_, interior_.order, interior_tape_);
  const JetBatch jets_b =
      net_.eval_batch(params, boundary_points_, boundary_.order, boundary_tape_);

  const Eigen::ArrayXd r_i = residuals(interior_, jets_i);
  const Eigen::ArrayXd r_b = residuals(boundary_, jets_b);
  const double sum_ri = abs_pow(r_i, p).sum();
  const double sum_rb = abs_pow(r_b, p).sum();

  breakdown_.interior = sum_ri / n_i;
  breakdown_.boundary = sum_rb / n_b;

  // Per-point weights w such that d(total)/d(residual_k) = w_k; denominator
  // corrections for the magnitude-normalized strategy are handled per term.
  Eigen::ArrayXd w_i, w_b;
  Eigen::ArrayXd mag_base, mag_correction;
  bool magnitude = false;

  switch (strategy_.kind) {
    case LossKind::original: {
      breakdown_.interior_denominator = 1.0;
      breakdown_.boundary_denominator = 1.0;
      breakdown_.total = total_original(breakdown_.interior, breakdown_.boundary);
      if (with_grad) {
        w_i = abs_pow_derivative(r_i, p) / n_i;
        w_b = abs_pow_derivative(r_b, p) / n_b;
      }
      break;
    }
    case LossKind::optimal_weight: {
      const double lambda = *strategy_.lambda;
      const double scale_i = problem_.domain_measure() * lambda;
      const double scale_b = problem_.boundary_measure() * (1.0 - lambda);
      breakdown_.interior_denominator = 1.0 / scale_i;
      breakdown_.boundary_denominator = 1.0 / scale_b;
      breakdown_.total = total_weighted(breakdown_.interior, breakdown_.boundary, lambda,
                                        problem_.domain_measure(), problem_.boundary_measure());
      if (with_grad) {
        w_i = scale_i / n_i * abs_pow_derivative(r_i, p);
        w_b = scale_b / n_b * abs_pow_derivative(r_b, p);
      }
      break;
    }
    case LossKind::magnitude_normalized: {
      magnitude = true;
      strategy_.validate(true);
      // Magnitude base m_k = sum_j |a_j d^b_j u(x_k)| + |F(x_k)|.
      mag_base = side_magnitude(interior_, jets_i);
      const double raw_denominator = abs_pow(mag_base, p).sum();
      const bool floored = raw_denominator < strategy_.interior_floor;
      const double d_i = floored ? strategy_.interior_floor : raw_denominator;
      const double d_b = *strategy_.boundary_denominator;
      breakdown_.interior_denominator = d_i / n_i;
      breakdown_.boundary_denominator = d_b / n_b;
      breakdown_.total = sum_ri / d_i + sum_rb / d_b;
      if (with_grad) {
        w_i = abs_pow_derivative(r_i, p) / d_i;
        w_b = abs_pow_derivative(r_b, p) / d_b;
        if (floored) {
          mag_correction = Eigen::ArrayXd::Zero(mag_base.size());
        } else {
          mag_correction = (sum_ri / (d_i * d_i)) * abs_pow_derivative(mag_base, p);
        }
      }
      break;
    }
  }

  breakdown_.log_total = breakdown_.total > 0.0 ? std::log(breakdown_.total)
                                                : -std::numeric_limits<double>::infinity();
  if (!with_grad) return breakdown_;
  if (breakdown_.total == 0.0) throw ZeroLossSignal();

  grad->setZero(net_.layout().size());

  JetSeeds seeds_i = JetSeeds::zero(problem_.dim, interior_.order, interior_points_.cols());
  for (const auto& term : interior_.terms) {
    Eigen::ArrayXd contribution = w_i;
    if (magnitude) {
      const Eigen::ArrayXd v = term.coeff * channel_values(jets_i, term.kind, term.row);
      contribution -= mag_correction * sign_array(v);
    }
    add_to_channel(seeds_i, term.kind, term.row, (contribution * term.coeff).eval());
  }
  net_.backward(interior_tape_, seeds_i, *grad);

  JetSeeds seeds_b = JetSeeds::zero(problem_.dim, boundary_.order, boundary_points_.cols());
  for (const auto& term : boundary_.terms) {
    add_to_channel(seeds_b, term.kind, term.row, (w_b * term.coeff).eval());
  }
  net_.backward(boundary_tape_, seeds_b, *grad);

  *grad /= breakdown_.total;  // chain rule of the logarithmic transform
  return breakdown_;
}

Eigen::ArrayXd LossEvaluator::side_magnitude(const SideCache& side, const JetBatch& jets) const {
  Eigen::ArrayXd m = side.data.abs();
  for (const auto& term : side.terms) {
    m += (term.coeff * channel_values(jets, term.kind, term.row)).abs();
  }
  return m;
}

Objective LossEvaluator::as_log_objective() {
  return [this](const Eigen::VectorXd& params) {
    ObjectiveValue out;
    const LossBreakdown& b = evaluate(params, out.gradient);
    out.value = b.log_total;
    return out;
  };
}

}  // namespace wpinn
