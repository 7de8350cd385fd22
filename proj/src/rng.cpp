#include "latnet/rng.hpp"

#include <limits>

#include "latnet/stats.hpp"

namespace latnet {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_id) {
  return splitmix64(splitmix64(seed) ^ splitmix64(~stream_id));
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(mix_seed(seed, stream_id)), gen_(seed_) {}

RngStream RngStream::substream(std::uint64_t stream_id) const {
  return RngStream(seed_, stream_id);
}

std::uint64_t RngStream::next_u64() { return gen_(); }

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % n;
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x < limit) return x % n;
  }
}

double RngStream::uniform01() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double RngStream::normal() { return std_normal_quantile(uniform01()); }

}  // namespace latnet
