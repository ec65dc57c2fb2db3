#include <array>
#include <cmath>
#include <random>

#include <doctest.h>

#include "wpinn/sampling.hpp"

using namespace wpinn;

TEST_CASE("interior samples are strictly inside with uniform moments") {
  std::mt19937_64 rng(101);
  const Eigen::MatrixXd pts = sample_interior(1, 100000, rng);
  CHECK(pts.rows() == 1);
  CHECK(pts.cols() == 100000);
  CHECK(pts.minCoeff() > 0.0);
  CHECK(pts.maxCoeff() < 1.0);
  CHECK(pts.mean() == doctest::Approx(0.5).epsilon(0.02));
  const double var = (pts.array() - pts.mean()).square().mean();
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.05));
}

TEST_CASE("interior sampling is deterministic given the rng") {
  std::mt19937_64 a(7), b(7);
  const Eigen::MatrixXd pa = sample_interior(2, 4, a);
  const Eigen::MatrixXd pb = sample_interior(2, 4, b);
  CHECK((pa.array() == pb.array()).all());
}

TEST_CASE("interior uniformity: chi-square over 16 sub-cells of the square") {
  std::mt19937_64 rng(2718);
  const Eigen::Index n = 100000;
  const Eigen::MatrixXd pts = sample_interior(2, n, rng);
  std::array<int, 16> counts{};
  for (Eigen::Index c = 0; c < n; ++c) {
    const int ix = std::min(3, static_cast<int>(pts(0, c) * 4.0));
    const int iy = std::min(3, static_cast<int>(pts(1, c) * 4.0));
    ++counts[static_cast<std::size_t>(4 * ix + iy)];
  }
  const double expected = static_cast<double>(n) / 16.0;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 37.697);  // chi-square 15 dof, significance 1e-3
}

TEST_CASE("boundary samples sit on faces, uniformly across them") {
  std::mt19937_64 rng(55);
  const Eigen::Index n = 100000;
  const Eigen::MatrixXd pts = sample_boundary(2, n, rng);
  std::array<Eigen::Index, 4> face_counts{};
  for (Eigen::Index c = 0; c < n; ++c) {
    int hits = 0;
    for (int r = 0; r < 2; ++r) {
      if (pts(r, c) == 0.0 || pts(r, c) == 1.0) {
        ++hits;
        ++face_counts[static_cast<std::size_t>(2 * r + (pts(r, c) == 1.0 ? 1 : 0))];
      }
    }
    REQUIRE(hits >= 1);  // at least one coordinate exactly on a face
  }
  for (Eigen::Index f : face_counts) {
    CHECK(std::abs(static_cast<double>(f) / static_cast<double>(n) - 0.25) < 0.01);
  }
}

TEST_CASE("one-dimensional boundary points are exactly the endpoints") {
  std::mt19937_64 rng(66);
  const Eigen::MatrixXd pts = sample_boundary(1, 50, rng);
  for (Eigen::Index c = 0; c < pts.cols(); ++c) {
    CHECK((pts(0, c) == 0.0 || pts(0, c) == 1.0));
  }
}

TEST_CASE("samplers reject empty or degenerate requests") {
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(sample_interior(2, 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_boundary(2, 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_interior(0, 4, rng), std::invalid_argument);
}

TEST_CASE("adaptive_check decision table") {
  const AdaptiveState state = make_adaptive_state(2, 8, 8, 5.0, false, 99);
  CHECK(adaptive_check(state, 1.0, 1.0, 1.0, 1.0) == AdaptiveDecision::keep);
  CHECK(adaptive_check(state, 1.0, 1.0, 6.0, 1.0) == AdaptiveDecision::double_interior);
  CHECK(adaptive_check(state, 1e-4, 1e-6, 1e-4, 6e-6) == AdaptiveDecision::double_boundary);
  CHECK(adaptive_check(state, 1.0, 1e-6, 6.0, 6e-6) == AdaptiveDecision::double_both);
  // Exactly q times is not "more than a factor q larger".
  CHECK(adaptive_check(state, 1.0, 1.0, 5.0, 1.0) == AdaptiveDecision::keep);
  CHECK_THROWS_AS(adaptive_check(state, -1.0, 0.0, 0.0, 0.0), std::invalid_argument);

  const AdaptiveState frozen = make_adaptive_state(1, 8, 2, 5.0, true, 99);
  CHECK(adaptive_check(frozen, 1.0, 1.0, 1.0, 9.0) == AdaptiveDecision::keep);
  CHECK(adaptive_check(frozen, 1.0, 1.0, 9.0, 9.0) == AdaptiveDecision::double_interior);
}

TEST_CASE("apply_doubling grows the targeted counts and regenerates sets") {
  AdaptiveState state = make_adaptive_state(2, 512, 64, 5.0, false, 31415);
  const Eigen::MatrixXd old_train_interior = state.train.interior;
  const Eigen::MatrixXd old_train_boundary = state.train.boundary;

  apply_doubling(state, AdaptiveDecision::double_interior);
  CHECK(state.n_interior == 1024);
  CHECK(state.n_boundary == 64);
  CHECK(state.train.interior.cols() == 1024);
  CHECK(state.validation.interior.cols() == 1024);
  CHECK(state.train.boundary.cols() == 64);
  // Both sets are regenerated, including the unaffected boundary component.
  CHECK((state.train.boundary.array() != old_train_boundary.array()).any());

  apply_doubling(state, AdaptiveDecision::double_boundary);
  CHECK(state.n_interior == 1024);
  CHECK(state.n_boundary == 128);

  apply_doubling(state, AdaptiveDecision::double_both);
  CHECK(state.n_interior == 2048);
  CHECK(state.n_boundary == 256);

  const Eigen::MatrixXd before_keep = state.train.interior;
  apply_doubling(state, AdaptiveDecision::keep);
  CHECK(state.n_interior == 2048);
  CHECK((state.train.interior.array() == before_keep.array()).all());
}

TEST_CASE("growth ceilings clamp doubling and turn it into a no-op at the top") {
  AdaptiveState state = make_adaptive_state(2, 8, 8, 5.0, false, 99);
  state.max_interior = 12;  // not a power-of-two multiple: forces a partial step
  state.max_boundary = 16;

  CHECK(apply_doubling(state, AdaptiveDecision::double_both) == AdaptiveDecision::double_both);
  CHECK(state.n_interior == 12);
  CHECK(state.n_boundary == 16);
  CHECK(state.train.interior.cols() == 12);

  // Interior is capped; a double_both request degrades to boundary-only...
  state.max_boundary = 64;
  CHECK(apply_doubling(state, AdaptiveDecision::double_both) ==
        AdaptiveDecision::double_boundary);
  CHECK(state.n_interior == 12);
  CHECK(state.n_boundary == 32);

  // ...and once both sit at their ceilings nothing regenerates at all.
  state.max_boundary = 32;
  const Eigen::MatrixXd before = state.train.interior;
  CHECK(apply_doubling(state, AdaptiveDecision::double_both) == AdaptiveDecision::keep);
  CHECK(state.n_interior == 12);
  CHECK(state.n_boundary == 32);
  CHECK((state.train.interior.array() == before.array()).all());

  // Ceiling 0 means unlimited.
  state.max_interior = 0;
  CHECK(apply_doubling(state, AdaptiveDecision::double_interior) ==
        AdaptiveDecision::double_interior);
  CHECK(state.n_interior == 24);
}

TEST_CASE("frozen one-dimensional boundary never grows") {
  AdaptiveState state = make_adaptive_state(1, 4, 2, 5.0, true, 8);
  CHECK(state.n_boundary == 2);
  CHECK(state.train.boundary.cols() == 2);
  CHECK(state.train.boundary(0, 0) == 0.0);
  CHECK(state.train.boundary(0, 1) == 1.0);

  apply_doubling(state, AdaptiveDecision::double_both);
  CHECK(state.n_interior == 8);
  CHECK(state.n_boundary == 2);
  CHECK(state.train.boundary.cols() == 2);
}

TEST_CASE("the collocation sequence is a pure function of seed and decisions") {
  AdaptiveState a = make_adaptive_state(2, 8, 8, 5.0, false, 4096);
  AdaptiveState b = make_adaptive_state(2, 8, 8, 5.0, false, 4096);
  CHECK((a.train.interior.array() == b.train.interior.array()).all());
  CHECK((a.validation.boundary.array() == b.validation.boundary.array()).all());
  // Train and validation draws differ (independent streams).
  CHECK((a.train.interior.array() != a.validation.interior.array()).any());

  apply_doubling(a, AdaptiveDecision::double_interior);
  apply_doubling(b, AdaptiveDecision::double_interior);
  CHECK((a.train.interior.array() == b.train.interior.array()).all());
  CHECK((a.validation.interior.array() == b.validation.interior.array()).all());

  AdaptiveState c = make_adaptive_state(2, 8, 8, 5.0, false, 4097);
  CHECK((c.train.interior.array() != b.train.interior.array()).any());
}
