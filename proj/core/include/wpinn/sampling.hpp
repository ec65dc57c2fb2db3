#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>

#include "wpinn/rng.hpp"

namespace wpinn {

/// n i.i.d. uniform points strictly inside (0,1)^d, one per column.
/// Deterministic given the rng state.  Throws std::invalid_argument for n=0.
Eigen::MatrixXd sample_interior(int dim, Eigen::Index n, std::mt19937_64& rng);

/// n i.i.d. uniform points on the boundary of the unit hypercube: the face is
/// chosen uniformly among the 2d faces (all faces have equal measure), its
/// coordinate is set exactly to 0 or 1, and the remaining coordinates are
/// uniform.  Throws std::invalid_argument for n=0.
Eigen::MatrixXd sample_boundary(int dim, Eigen::Index n, std::mt19937_64& rng);

/// Interior and boundary collocation points drawn from one seed.
struct CollocationSet {
  Eigen::MatrixXd interior;  ///< dim x n_interior
  Eigen::MatrixXd boundary;  ///< dim x n_boundary
  std::uint64_t seed = 0;    ///< seed both matrices were drawn from
};

enum class AdaptiveDecision { keep, double_interior, double_boundary, double_both };

/// Train/validation point sets plus the doubling controller's counts.
///
/// Train and validation sets are drawn from independent seed streams derived
/// from the master seed.  When `boundary_frozen` is set with dim == 1, the
/// boundary sets are pinned to the two endpoints {0} and {1} (which cover the
/// boundary completely) and never regenerate.
struct AdaptiveState {
  int dim = 1;
  Eigen::Index n_interior = 0;
  Eigen::Index n_boundary = 0;
  double q = 5.0;  ///< validation/train loss ratio that triggers doubling
  bool boundary_frozen = false;
  /// Hard ceilings on the point counts; 0 means unlimited.  An overfitting
  /// run can otherwise double itself into millions of points (each iteration
  /// then costs proportionally more), so callers with a wall-clock budget set
  /// these.  Growth clamps to the ceiling; at the ceiling doubling becomes a
  /// no-op.
  Eigen::Index max_interior = 0;
  Eigen::Index max_boundary = 0;
  CollocationSet train;
  CollocationSet validation;
  SeedStream train_seeds;
  SeedStream validation_seeds;
};

/// Builds the initial state and draws both point sets.
AdaptiveState make_adaptive_state(int dim, Eigen::Index n_interior, Eigen::Index n_boundary,
                                  double q, bool boundary_frozen, std::uint64_t master_seed);

/// Component-wise doubling trigger: the interior (boundary) count doubles
/// when the validation loss component exceeds q times the training component.
/// A frozen boundary never doubles.  All loss values must be finite and
/// non-negative.
AdaptiveDecision adaptive_check(const AdaptiveState& state, double train_interior,
                                double train_boundary, double val_interior, double val_boundary);

/// Applies a doubling decision: affected counts double (clamped to the
/// state's ceilings) and BOTH the train and validation sets are regenerated
/// at the new sizes from fresh seed-stream draws (unaffected counts keep
/// their value).  Returns the decision actually applied after clamping;
/// `keep` — requested or the result of every affected count sitting at its
/// ceiling — returns the state untouched, same point sets included.
AdaptiveDecision apply_doubling(AdaptiveState& state, AdaptiveDecision decision);

}  // namespace wpinn
