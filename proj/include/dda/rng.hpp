#pragma once

#include <cstdint>
#include <random>

namespace dda {

/// Seeded stream with a platform-independent output sequence. The engine is
/// std::mt19937_64, whose outputs the standard fixes; distributions are
/// derived here rather than through <random> distributions, whose
/// algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dda
