#pragma once

#include <cstdint>
#include <random>

namespace latnet {

// Mixes a base seed with a stream id into a new effective seed (splitmix64).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_id);

// Deterministic pseudo-random stream with reproducible substreams.
// A (seed, stream id) pair fully determines the draw sequence, so per-fold
// and per-chain substreams can run in parallel and still reproduce bitwise.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  // Derives an independent stream from this stream and the given id.
  RngStream substream(std::uint64_t stream_id) const;

  std::uint64_t next_u64();
  std::uint64_t uniform_below(std::uint64_t n);  // unbiased draw in [0, n)
  double uniform01();                            // strictly inside (0, 1)
  double uniform(double lo, double hi);
  double normal();                               // N(0,1) via inverse cdf

  std::uint64_t effective_seed() const { return seed_; }

 private:
  std::uint64_t seed_;  // already mixed; substreams derive from this
  std::mt19937_64 gen_;
};

}  // namespace latnet
