#include "wpinn/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace wpinn {

namespace {

void check_count(Eigen::Index n, const char* what) {
  if (n <= 0) {
    throw std::invalid_argument(std::string(what) + ": point count must be positive");
  }
}

/// Boundary sets for d=1 when frozen: the two endpoints, in fixed order.
Eigen::MatrixXd endpoint_boundary() {
  Eigen::MatrixXd pts(1, 2);
  pts(0, 0) = 0.0;
  pts(0, 1) = 1.0;
  return pts;
}

void regenerate(CollocationSet& set, int dim, Eigen::Index n_interior, Eigen::Index n_boundary,
                bool boundary_frozen, std::uint64_t seed) {
  set.seed = seed;
  std::mt19937_64 rng(seed);
  set.interior = sample_interior(dim, n_interior, rng);
  if (boundary_frozen && dim == 1) {
    set.boundary = endpoint_boundary();
  } else {
    set.boundary = sample_boundary(dim, n_boundary, rng);
  }
}

}  // namespace

Eigen::MatrixXd sample_interior(int dim, Eigen::Index n, std::mt19937_64& rng) {
  if (dim <= 0) throw std::invalid_argument("sample_interior: dimension must be positive");
  check_count(n, "sample_interior");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd pts(dim, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (int r = 0; r < dim; ++r) {
      double u = unit(rng);
      while (u <= 0.0 || u >= 1.0) u = unit(rng);  // strictly inside
      pts(r, c) = u;
    }
  }
  return pts;
}

Eigen::MatrixXd sample_boundary(int dim, Eigen::Index n, std::mt19937_64& rng) {
  if (dim <= 0) throw std::invalid_argument("sample_boundary: dimension must be positive");
  check_count(n, "sample_boundary");
  std::uniform_int_distribution<int> face(0, 2 * dim - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd pts(dim, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const int f = face(rng);
    const int axis = f >> 1;
    const double side = static_cast<double>(f & 1);
    for (int r = 0; r < dim; ++r) {
      pts(r, c) = (r == axis) ? side : unit(rng);
    }
  }
  return pts;
}

AdaptiveState make_adaptive_state(int dim, Eigen::Index n_interior, Eigen::Index n_boundary,
                                  double q, bool boundary_frozen, std::uint64_t master_seed) {
  if (dim <= 0) throw std::invalid_argument("make_adaptive_state: dimension must be positive");
  check_count(n_interior, "make_adaptive_state (interior)");
  if (q <= 1.0) throw std::invalid_argument("make_adaptive_state: q must exceed 1");
  AdaptiveState state;
  state.dim = dim;
  state.n_interior = n_interior;
  state.q = q;
  state.boundary_frozen = boundary_frozen && dim == 1;
  state.n_boundary = state.boundary_frozen ? 2 : n_boundary;
  if (!state.boundary_frozen) check_count(n_boundary, "make_adaptive_state (boundary)");
  state.train_seeds = SeedStream(master_seed, 1);
  state.validation_seeds = SeedStream(master_seed, 2);
  regenerate(state.train, dim, state.n_interior, state.n_boundary, state.boundary_frozen,
             state.train_seeds.next());
  regenerate(state.validation, dim, state.n_interior, state.n_boundary, state.boundary_frozen,
             state.validation_seeds.next());
  return state;
}

AdaptiveDecision adaptive_check(const AdaptiveState& state, double train_interior,
                                double train_boundary, double val_interior, double val_boundary) {
  for (double v : {train_interior, train_boundary, val_interior, val_boundary}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("adaptive_check: loss values must be finite and non-negative");
    }
  }
  const bool interior = val_interior > state.q * train_interior;
  const bool boundary = !state.boundary_frozen && val_boundary > state.q * train_boundary;
  if (interior && boundary) return AdaptiveDecision::double_both;
  if (interior) return AdaptiveDecision::double_interior;
  if (boundary) return AdaptiveDecision::double_boundary;
  return AdaptiveDecision::keep;
}

namespace {

/// min(2n, ceiling); a ceiling of 0 means unlimited.
Eigen::Index grow_count(Eigen::Index n, Eigen::Index ceiling) {
  const Eigen::Index doubled = 2 * n;
  return (ceiling > 0 && doubled > ceiling) ? ceiling : doubled;
}

}  // namespace

AdaptiveDecision apply_doubling(AdaptiveState& state, AdaptiveDecision decision) {
  if (decision == AdaptiveDecision::keep) return AdaptiveDecision::keep;
  bool grew_interior = false;
  bool grew_boundary = false;
  if (decision == AdaptiveDecision::double_interior || decision == AdaptiveDecision::double_both) {
    const Eigen::Index next = grow_count(state.n_interior, state.max_interior);
    grew_interior = next > state.n_interior;
    state.n_interior = next;
  }
  if ((decision == AdaptiveDecision::double_boundary ||
       decision == AdaptiveDecision::double_both) &&
      !state.boundary_frozen) {
    const Eigen::Index next = grow_count(state.n_boundary, state.max_boundary);
    grew_boundary = next > state.n_boundary;
    state.n_boundary = next;
  }
  if (!grew_interior && !grew_boundary) return AdaptiveDecision::keep;
  regenerate(state.train, state.dim, state.n_interior, state.n_boundary, state.boundary_frozen,
             state.train_seeds.next());
  regenerate(state.validation, state.dim, state.n_interior, state.n_boundary,
             state.boundary_frozen, state.validation_seeds.next());
  if (grew_interior && grew_boundary) return AdaptiveDecision::double_both;
  return grew_interior ? AdaptiveDecision::double_interior : AdaptiveDecision::double_boundary;
}

}  // namespace wpinn
