#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dtnsim {

/// Deterministic random stream keyed by (master seed, label).
///
/// Each subsystem draws from its own labelled stream (`traffic`, `map`,
/// `mobility/<node>`), so the draws one subsystem makes never shift the
/// sequence seen by another. Draw helpers are implemented here rather than
/// with <random> distributions, whose output is implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view label);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 bits of mantissa.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi]; returns lo exactly when lo == hi.
  double uniform(double lo, double hi) { return lo == hi ? lo : lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n);

  /// Uniform integer in [lo, hi].
  std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) { return lo + index(hi - lo + 1); }

 private:
  std::mt19937_64 engine_;
};

/// Stable 64-bit key for (seed, label); exposed for tests.
std::uint64_t stream_key(std::uint64_t seed, std::string_view label);

}  // namespace dtnsim
