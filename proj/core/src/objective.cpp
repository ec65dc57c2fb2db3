#include "wpinn/objective.hpp"

#include <cmath>
#include <string>

namespace wpinn {

ObjectiveValue objective_gradient(const Objective& objective, const Eigen::VectorXd& params) {
  ObjectiveValue result = objective(params);
  if (!std::isfinite(result.value)) {
    throw NonFiniteObjectiveError("objective value is non-finite (" +
                                  std::to_string(result.value) + ") at |params| = " +
                                  std::to_string(params.norm()));
  }
  for (Eigen::Index i = 0; i < result.gradient.size(); ++i) {
    if (!std::isfinite(result.gradient[i])) {
      throw NonFiniteObjectiveError("objective gradient entry " + std::to_string(i) +
                                    " is non-finite at |params| = " +
                                    std::to_string(params.norm()));
    }
  }
  return result;
}

}  // namespace wpinn
