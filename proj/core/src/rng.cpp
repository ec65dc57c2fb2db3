#include "wpinn/rng.hpp"

namespace wpinn {

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

SeedStream::SeedStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : state_(mix_seed(master_seed ^ mix_seed(stream_id + 0x632BE59BD9B4E019ULL))) {}

std::uint64_t SeedStream::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace wpinn
