// Copyright 2026 The signmom Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace signmom {

/// SplitMix64 finalizer. Used for seeding and for the stream key schedule.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seeded pseudo-random stream with a fully specified output sequence.
///
/// The engine is xoshiro256** seeded by four successive SplitMix64 outputs.
/// Every derived quantity (uniform, normal, bounded integer) is defined here
/// rather than through <random> distributions, whose outputs are
/// implementation-defined, so a trajectory replays identically on any
/// standard library and can be re-derived in another language.
///
///   uniform()  = (next() >> 11) * 2^-53                      one draw, [0,1)
///   normal()   = sqrt(-2 ln(1-u1)) * cos(2 pi u2)            two draws
///   below(n)   = floor(uniform() * n)                        one draw
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) noexcept {
    std::uint64_t s = seed;
    for (auto& w : state_) {
      s += 0x9E3779B97F4A7C15ULL;
      std::uint64_t z = s;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      w = z ^ (z >> 31);
    }
  }

  /// Key schedule for per-(node, round) streams: the seed is
  /// mix64(mix64(mix64(master) ^ node) ^ round).
  static RandomStream derive(std::uint64_t master, std::uint64_t node,
                             std::uint64_t round) noexcept {
    return RandomStream(mix64(mix64(mix64(master) ^ node) ^ round));
  }

  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double normal() noexcept {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log1p(-u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  }

  friend bool operator==(const RandomStream&, const RandomStream&) = default;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

/// Reserved node keys for RandomStream::derive. Worker nodes use 1..n.
inline constexpr std::uint64_t kServerKey = 0;
inline constexpr std::uint64_t kRunKey = ~std::uint64_t{0};
inline constexpr std::uint64_t kShiftKey = ~std::uint64_t{0} - 1;

}  // namespace signmom
