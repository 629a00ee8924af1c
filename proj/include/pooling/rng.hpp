#ifndef POOLING_RNG_HPP_
#define POOLING_RNG_HPP_

#include <cstdint>
#include <random>

namespace pooling {

/// Seedable generator whose output is identical on every platform.
///
/// The bit source is std::mt19937_64, whose sequence is fixed by the
/// standard. The standard distributions are not (their algorithms are
/// implementation-defined), so all variates are derived here from raw
/// 64-bit draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random mantissa bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1); safe as a log() argument.
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  double normal();
  double exponential(double rate);
  double gamma(double shape);
  double beta(double alpha, double beta);

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of the index-th independent stream derived from a base seed:
/// mix64(base + golden * (index + 1)). Sweeps draw instance s from
/// stream_seed(base, s), so the instance list does not depend on how work
/// is scheduled.
std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index);

}  // namespace pooling

#endif
