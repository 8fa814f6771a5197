#pragma once

#include <cstdint>

#include "povmkit/operator_core.hpp"

namespace povmkit {

/// Counter-based generator keyed by (seed, stream).
///
/// Draw n of stream s is mix(key(seed, s) + (n + 1) * 0x9E3779B97F4A7C15), with
/// mix the SplitMix64 finalizer and key(seed, s) = mix(seed ^ mix(s + golden)).
/// Any draw can be reproduced from its coordinates alone, so independent
/// streams can be consumed in any order or on any thread.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter = 0) noexcept;

  std::uint64_t next() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;

  /// Standard normal via Box-Muller (consumes two draws).
  double normal() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of R's diagonal folded back into Q.
Matrix random_unitary(Eigen::Index dim, CounterRng& rng);

}  // namespace povmkit
