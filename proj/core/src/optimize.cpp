#include "wpinn/optimize.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace wpinn {

void LBFGSConfig::validate() const {
  if (history < 1) throw std::invalid_argument("LBFGSConfig: history must be >= 1");
  if (max_iterations < 0) throw std::invalid_argument("LBFGSConfig: negative iteration budget");
  if (!(wolfe_c1 > 0.0 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0)) {
    throw std::invalid_argument("LBFGSConfig: need 0 < c1 < c2 < 1");
  }
  if (!(grad_tolerance >= 0.0)) {
    throw std::invalid_argument("LBFGSConfig: grad_tolerance must be non-negative");
  }
  if (max_line_search_steps < 2) {
    throw std::invalid_argument("LBFGSConfig: max_line_search_steps must be >= 2");
  }
}

void AdamConfig::validate() const {
  if (!(step_size > 0.0)) throw std::invalid_argument("AdamConfig: step_size must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("AdamConfig: betas must lie in [0,1)");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("AdamConfig: epsilon must be positive");
  if (max_iterations < 0) throw std::invalid_argument("AdamConfig: negative iteration budget");
  if (!(grad_tolerance >= 0.0)) {
    throw std::invalid_argument("AdamConfig: grad_tolerance must be non-negative");
  }
}

const char* to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::max_iterations:
      return "max_iterations";
    case TerminationReason::gradient_tolerance:
      return "gradient_tolerance";
    case TerminationReason::line_search_failed:
      return "line_search_failed";
    case TerminationReason::callback_stop:
      return "callback_stop";
    case TerminationReason::zero_loss:
      return "zero_loss";
  }
  return "unknown";
}

LbfgsHistory::LbfgsHistory(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("LbfgsHistory: capacity must be >= 1");
  pairs_.reserve(static_cast<std::size_t>(capacity));
}

void LbfgsHistory::clear() { pairs_.clear(); }

bool LbfgsHistory::push(const Eigen::VectorXd& s, const Eigen::VectorXd& y) {
  const double sy = s.dot(y);
  if (!(sy > 1e-10 * s.norm() * y.norm())) return false;  // preserve positive definiteness
  if (static_cast<int>(pairs_.size()) == capacity_) pairs_.erase(pairs_.begin());
  pairs_.push_back({s, y, 1.0 / sy});
  return true;
}

Eigen::VectorXd LbfgsHistory::apply_inverse_hessian(const Eigen::VectorXd& v) const {
  Eigen::VectorXd q = v;
  const int k = size();
  std::vector<double> alpha(static_cast<std::size_t>(k));
  for (int i = k - 1; i >= 0; --i) {
    alpha[i] = pairs_[i].rho * pairs_[i].s.dot(q);
    q -= alpha[i] * pairs_[i].y;
  }
  if (k > 0) {
    const Pair& newest = pairs_.back();
    q *= newest.s.dot(newest.y) / newest.y.squaredNorm();  // gamma scaling of H_0
  }
  for (int i = 0; i < k; ++i) {
    const double beta = pairs_[i].rho * pairs_[i].y.dot(q);
    q += (alpha[i] - beta) * pairs_[i].s;
  }
  return q;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct ProbePoint {
  double alpha = 0.0;
  double f = 0.0;
  double dphi = 0.0;  // directional derivative g(x)' p
  Eigen::VectorXd x;
  Eigen::VectorXd g;
  bool finite = false;
};

struct LineSearchOutcome {
  bool accepted = false;
  bool wolfe_ok = false;  // both strong-Wolfe conditions hold at the point
  ProbePoint point;
};

/// Minimizer of the cubic Hermite interpolant of phi between two probes
/// (Nocedal & Wright eq. 3.59), safeguarded toward the interval midpoint.
double interpolate_step(const ProbePoint& lo, const ProbePoint& hi) {
  const double a = lo.alpha, b = hi.alpha;
  const double mid = 0.5 * (a + b);
  if (!(std::isfinite(lo.f) && std::isfinite(hi.f) && std::isfinite(lo.dphi) &&
        std::isfinite(hi.dphi))) {
    return mid;
  }
  const double d1 = lo.dphi + hi.dphi - 3.0 * (lo.f - hi.f) / (a - b);
  const double disc = d1 * d1 - lo.dphi * hi.dphi;
  if (!(disc >= 0.0)) return mid;
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  const double denom = hi.dphi - lo.dphi + 2.0 * d2;
  if (denom == 0.0) return mid;
  const double candidate = b - (b - a) * (hi.dphi + d2 - d1) / denom;
  const double left = std::min(a, b), right = std::max(a, b);
  const double margin = 0.2 * (right - left);
  if (!std::isfinite(candidate) || candidate < left + margin || candidate > right - margin) {
    return mid;
  }
  return candidate;
}

/// Strong-Wolfe line search: bracketing with step doubling, then zoom with
/// cubic interpolation.  Non-finite trial values shrink the step (bracket
/// phase) or the interval (zoom phase).  When the Wolfe conditions cannot be
/// met within the evaluation budget, the best strictly improving probe is
/// accepted with wolfe_ok = false; with no improving probe the search fails.
class LineSearcher {
 public:
  LineSearcher(const Objective& objective, const LBFGSConfig& config, const Eigen::VectorXd& x0,
               double f0, const Eigen::VectorXd& p, double dphi0, Eigen::VectorXd& trial_scratch)
      : objective_(objective),
        config_(config),
        x0_(x0),
        p_(p),
        f0_(f0),
        dphi0_(dphi0),
        trial_(trial_scratch) {}

  int evaluations() const { return evaluations_; }

  LineSearchOutcome run(double alpha_init) {
    ProbePoint prev;  // the step origin; x/g left empty, never accepted
    prev.alpha = 0.0;
    prev.f = f0_;
    prev.dphi = dphi0_;
    prev.finite = true;

    double alpha = alpha_init;
    for (int iter = 0; evaluations_ < config_.max_line_search_steps; ++iter) {
      ProbePoint cur = probe(alpha);
      if (!cur.finite) {
        // Too far out (overflow in the objective): pull back toward the last
        // good step and retry.
        alpha = 0.5 * (prev.alpha + alpha);
        if (!(alpha > prev.alpha) || alpha < 1e-300) break;
        continue;
      }
      if (!sufficient_decrease(cur) || (iter > 0 && cur.f >= prev.f)) {
        return zoom(std::move(prev), std::move(cur));
      }
      if (curvature_ok(cur)) return accept(std::move(cur), true);
      if (cur.dphi >= 0.0) return zoom(std::move(cur), std::move(prev));
      prev = std::move(cur);
      alpha *= 2.0;
      if (alpha > 1e12) break;  // direction looks unbounded below
    }
    return fallback(prev);
  }

 private:
  ProbePoint probe(double alpha) {
    trial_ = x0_ + alpha * p_;
    ObjectiveValue value = objective_(trial_);  // may throw ZeroLossSignal
    ++evaluations_;
    ProbePoint out;
    out.alpha = alpha;
    out.x = trial_;
    out.f = value.value;
    out.g = std::move(value.gradient);
    out.finite = std::isfinite(out.f) && out.g.allFinite();
    out.dphi = out.finite ? out.g.dot(p_) : std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  bool sufficient_decrease(const ProbePoint& pt) const {
    return pt.f <= f0_ + config_.wolfe_c1 * pt.alpha * dphi0_;
  }
  bool curvature_ok(const ProbePoint& pt) const {
    return std::abs(pt.dphi) <= -config_.wolfe_c2 * dphi0_;
  }

  LineSearchOutcome accept(ProbePoint pt, bool wolfe_ok) {
    LineSearchOutcome out;
    out.accepted = true;
    out.wolfe_ok = wolfe_ok;
    out.point = std::move(pt);
    return out;
  }

  /// Best-effort exit: accept a strictly improving probe without the full
  /// Wolfe guarantee, or report failure.
  LineSearchOutcome fallback(ProbePoint& best) {
    if (best.alpha > 0.0 && best.finite && best.f < f0_) {
      return accept(std::move(best), false);
    }
    return {};
  }

  LineSearchOutcome zoom(ProbePoint lo, ProbePoint hi) {
    while (evaluations_ < config_.max_line_search_steps) {
      const double width = std::abs(hi.alpha - lo.alpha);
      if (width <= std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::abs(lo.alpha) + std::abs(hi.alpha))) {
        break;  // bracket collapsed without meeting the curvature condition
      }
      ProbePoint cur = probe(interpolate_step(lo, hi));
      if (!cur.finite) {
        cur.f = std::numeric_limits<double>::infinity();
        hi = std::move(cur);
        continue;
      }
      if (!sufficient_decrease(cur) || cur.f >= lo.f) {
        hi = std::move(cur);
      } else {
        if (curvature_ok(cur)) return accept(std::move(cur), true);
        if (cur.dphi * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = std::move(cur);
      }
    }
    return fallback(lo);
  }

  const Objective& objective_;
  const LBFGSConfig& config_;
  const Eigen::VectorXd& x0_;
  const Eigen::VectorXd& p_;
  const double f0_;
  const double dphi0_;
  Eigen::VectorXd& trial_;
  int evaluations_ = 0;
};

bool finite_objective(const ObjectiveValue& value) {
  return std::isfinite(value.value) && value.gradient.allFinite();
}

}  // namespace

OptimizeResult lbfgs_minimize(const Objective& objective, Eigen::VectorXd x0,
                              const LBFGSConfig& config, const OptimizeCallback& callback) {
  config.validate();
  if (!objective) throw std::invalid_argument("lbfgs_minimize: null objective");

  const auto start = Clock::now();
  OptimizeResult result;
  LbfgsHistory history(config.history);
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd trial = x;  // the point most recently handed to the objective

  try {
    ObjectiveValue initial = objective(x);
    ++result.function_evaluations;
    if (!finite_objective(initial)) {
      throw NonFiniteObjectiveError("lbfgs_minimize: objective non-finite at the initial point");
    }
    double f = initial.value;
    Eigen::VectorXd g = std::move(initial.gradient);

    for (int k = 1; k <= config.max_iterations; ++k) {
      if (g.norm() < config.grad_tolerance) {
        result.reason = TerminationReason::gradient_tolerance;
        break;
      }

      Eigen::VectorXd p = -history.apply_inverse_hessian(g);
      double dphi0 = g.dot(p);
      if (!(dphi0 < 0.0)) {
        // Numerically lost the descent property: restart from steepest descent.
        history.clear();
        p = -g;
        dphi0 = -g.squaredNorm();
        if (!(dphi0 < 0.0)) {
          result.reason = TerminationReason::gradient_tolerance;
          break;
        }
      }
      const double alpha_init =
          history.size() == 0 ? 1.0 / std::max(p.norm(), 1e-12) : 1.0;

      LineSearcher searcher(objective, config, x, f, p, dphi0, trial);
      LineSearchOutcome outcome = searcher.run(alpha_init);
      result.function_evaluations += searcher.evaluations();
      if (!outcome.accepted) {
        result.reason = TerminationReason::line_search_failed;
        break;
      }
      if (!outcome.wolfe_ok) ++result.wolfe_violations;

      history.push(outcome.point.x - x, outcome.point.g - g);
      x = std::move(outcome.point.x);
      f = outcome.point.f;
      g = std::move(outcome.point.g);
      result.iterations = k;

      TraceRow row;
      row.iteration = k;
      row.total = f;
      row.wall_seconds = seconds_since(start);
      CallbackAction action = CallbackAction::proceed;
      if (callback) {
        const IterationInfo info{.iteration = k,
                                 .params = x,
                                 .objective = f,
                                 .gradient_norm = g.norm(),
                                 .step_length = outcome.point.alpha,
                                 .function_evaluations = result.function_evaluations};
        action = callback(info, row);
      }
      result.trace.rows.push_back(row);
      if (action == CallbackAction::stop) {
        result.reason = TerminationReason::callback_stop;
        break;
      }
      if (action == CallbackAction::reset_history) {
        history.clear();
        trial = x;
        ObjectiveValue fresh = objective(x);  // the objective changed under us
        ++result.function_evaluations;
        if (!finite_objective(fresh)) {
          throw NonFiniteObjectiveError(
              "lbfgs_minimize: objective non-finite after a history reset");
        }
        f = fresh.value;
        g = std::move(fresh.gradient);
      }
    }
    result.params = std::move(x);
    result.objective = f;
  } catch (const ZeroLossSignal&) {
    result.reason = TerminationReason::zero_loss;
    result.params = std::move(trial);
    result.objective = -std::numeric_limits<double>::infinity();
  }
  return result;
}

OptimizeResult adam_minimize(const Objective& objective, Eigen::VectorXd x0,
                             const AdamConfig& config, const OptimizeCallback& callback) {
  config.validate();
  if (!objective) throw std::invalid_argument("adam_minimize: null objective");

  const auto start = Clock::now();
  OptimizeResult result;
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd trial = x;

  try {
    auto evaluate = [&](const Eigen::VectorXd& at) {
      trial = at;
      ObjectiveValue value = objective(at);
      ++result.function_evaluations;
      if (!finite_objective(value)) {
        throw NonFiniteObjectiveError("adam_minimize: objective non-finite");
      }
      return value;
    };

    ObjectiveValue current = evaluate(x);
    Eigen::ArrayXd m = Eigen::ArrayXd::Zero(x.size());
    Eigen::ArrayXd v = Eigen::ArrayXd::Zero(x.size());
    int since_reset = 0;

    for (int k = 1; k <= config.max_iterations; ++k) {
      if (config.grad_tolerance > 0.0 && current.gradient.norm() < config.grad_tolerance) {
        result.reason = TerminationReason::gradient_tolerance;
        break;
      }
      ++since_reset;
      const Eigen::ArrayXd g = current.gradient.array();
      m = config.beta1 * m + (1.0 - config.beta1) * g;
      v = config.beta2 * v + (1.0 - config.beta2) * g.square();
      const double bias1 = 1.0 - std::pow(config.beta1, since_reset);
      const double bias2 = 1.0 - std::pow(config.beta2, since_reset);
      x.array() -= config.step_size * (m / bias1) / ((v / bias2).sqrt() + config.epsilon);
      current = evaluate(x);
      result.iterations = k;

      TraceRow row;
      row.iteration = k;
      row.total = current.value;
      row.wall_seconds = seconds_since(start);
      CallbackAction action = CallbackAction::proceed;
      if (callback) {
        const IterationInfo info{.iteration = k,
                                 .params = x,
                                 .objective = current.value,
                                 .gradient_norm = current.gradient.norm(),
                                 .step_length = config.step_size,
                                 .function_evaluations = result.function_evaluations};
        action = callback(info, row);
      }
      result.trace.rows.push_back(row);
      if (action == CallbackAction::stop) {
        result.reason = TerminationReason::callback_stop;
        break;
      }
      if (action == CallbackAction::reset_history) {
        m.setZero();
        v.setZero();
        since_reset = 0;
        current = evaluate(x);
      }
    }
    result.params = std::move(x);
    result.objective = current.value;
  } catch (const ZeroLossSignal&) {
    result.reason = TerminationReason::zero_loss;
    result.params = std::move(trial);
    result.objective = -std::numeric_limits<double>::infinity();
  }
  return result;
}

}  // namespace wpinn
