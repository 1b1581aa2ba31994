// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace speclab {

/// 64-bit linear congruential generator (Knuth MMIX constants). Kept in-repo
/// so that seeded runs reproduce across platforms and languages:
/// state <- state * 6364136223846793005 + 1442695040888963407 (mod 2^64),
/// and a unit real is the top 53 bits of the new state times 2^-53.
class Lcg64 {
 public:
  explicit Lcg64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return state_;
  }

  /// Uniform in [0, 1).
  double next_unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [-1, 1).
  double next_symmetric() noexcept { return 2.0 * next_unit() - 1.0; }

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace speclab
