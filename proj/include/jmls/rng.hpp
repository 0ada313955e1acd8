#pragma once

#include <cstdint>
#include <random>

namespace jmls {

/// Random stream used by every sampler. Streams are derived from a single
/// 64-bit seed and a (stream, substream) counter pair, so the draws consumed
/// by one stage never depend on how many draws another stage made.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static Rng stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0);

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();

  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace jmls
