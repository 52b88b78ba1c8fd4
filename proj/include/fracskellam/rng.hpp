#pragma once

#include <cstdint>
#include <random>

namespace fracskellam {

/// Deterministic, seedable, splittable random source. The same
/// (seed, stream_id) pair always produces the same draw sequence;
/// distinct stream ids give statistically independent streams (the
/// engine is keyed by a SplitMix64 hash of both values).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id), engine_(key(seed, stream_id)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Independent stream derived from the same seed.
  RngStream substream(std::uint64_t offset) const {
    return RngStream(seed_, stream_id_ + 0x1000000 + offset);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0,1); never returns an endpoint.
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double exponential(double rate = 1.0) { return -std::log(uniform01()) / rate; }

  long long poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    std::poisson_distribution<long long> d(mean);
    return d(engine_);
  }

  long long binomial(long long n, double p) {
    if (n <= 0 || !(p > 0.0)) return 0;
    if (p >= 1.0) return n;
    std::binomial_distribution<long long> d(n, p);
    return d(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }
  static std::uint64_t key(std::uint64_t seed, std::uint64_t stream) {
    return splitmix(splitmix(seed) ^ splitmix(stream * 0xD6E8FEB86659FD93ULL + 1));
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace fracskellam
