#pragma once

#include <cstdint>

namespace wpinn {

/// splitmix64 finalizer; maps any 64-bit value to a well-mixed one.
std::uint64_t mix_seed(std::uint64_t x);

/// Deterministic stream of 64-bit seeds derived from (master seed, stream id).
///
/// Every consumer of randomness (weight initialisation, training points,
/// validation points, eval grids, ...) pulls from its own stream, so
/// regenerating one data set never shifts the draws of another.  Streams are
/// cheap value types; copying one forks the sequence.
class SeedStream {
 public:
  SeedStream() = default;
  SeedStream(std::uint64_t master_seed, std::uint64_t stream_id);

  /// Next seed in this stream (splitmix64 sequence).
  std::uint64_t next();

 private:
  std::uint64_t state_ = 0;
};

}  // namespace wpinn
