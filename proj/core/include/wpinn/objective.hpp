#pragma once

#include <Eigen/Core>

#include <functional>
#include <stdexcept>

namespace wpinn {

/// Value and exact parameter gradient of a scalar objective.
struct ObjectiveValue {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

/// Differentiable scalar objective over a parameter vector.  The loss
/// builders produce these with reverse-accumulated exact gradients.
using Objective = std::function<ObjectiveValue(const Eigen::VectorXd&)>;

/// Thrown when an objective produces a non-finite value or gradient entry.
class NonFiniteObjectiveError : public std::runtime_error {
 public:
  explicit NonFiniteObjectiveError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown (through the objective) when the underlying loss is exactly zero:
/// the logarithmic transform is undefined there, but the iterate is a
/// perfect minimizer, so optimizers treat this as convergence, not failure.
class ZeroLossSignal : public std::runtime_error {
 public:
  ZeroLossSignal() : std::runtime_error("loss is exactly zero") {}
};

/// Evaluates `objective` at `params` and verifies that the value and every
/// gradient component are finite.  Throws NonFiniteObjectiveError with a
/// diagnostic message otherwise.
ObjectiveValue objective_gradient(const Objective& objective, const Eigen::VectorXd& params);

}  // namespace wpinn
