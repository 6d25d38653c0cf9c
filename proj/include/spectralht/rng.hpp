#pragma once

#include <cstdint>
#include <random>

namespace stht {

/// splitmix64 finalizer; used to derive independent stream seeds from a master
/// seed so that parallel trials are reproducible regardless of scheduling.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic random source. All distributions are built directly on the
/// mt19937_64 bit stream (no std::uniform_real_distribution etc.) so that a
/// given seed yields the same draws on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe as a log() argument.
  double uniform01_open() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (pairs are cached).
  double normal();

  /// Uniform integer in [0, n), rejection sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace stht
