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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "signmom/problems.hpp"
#include "signmom/rng.hpp"

namespace signmom {

/// A d-length vector over {-1, +1}: one bit per coordinate on the wire.
class SignMessage {
 public:
  SignMessage() = default;
  explicit SignMessage(std::vector<std::int8_t> values);

  std::size_t size() const { return values_.size(); }
  std::size_t bit_cost() const { return values_.size(); }
  std::int8_t operator[](std::size_t k) const { return values_[k]; }
  std::span<const std::int8_t> values() const { return values_; }

  /// Bitmap: +1 -> 1, -1 -> 0, bit k at byte k/8 position k%8 (LSB first),
  /// zero padding after the last coordinate.
  std::vector<std::uint8_t> pack() const;
  static SignMessage unpack(std::span<const std::uint8_t> bytes, std::size_t d);
  static std::size_t packed_size(std::size_t d) { return (d + 7) / 8; }

  friend bool operator==(const SignMessage&, const SignMessage&) = default;

 private:
  std::vector<std::int8_t> values_;
};

/// Coordinatewise sign with sign(0) = +1. Rejects non-finite input.
SignMessage sign(std::span<const double> v);

/// S_R: coordinate k is +1 with probability (R + v_k) / (2R), else -1.
/// Consumes exactly d uniforms from `rng`, in coordinate order; coordinate k
/// is +1 iff its uniform u satisfies u < (R + v_k) / (2R).
/// Throws RangeViolation when ||v||_inf > R.
SignMessage unbiased_sign(std::span<const double> v, double R, RandomStream& rng);

/// Arithmetic mean of the messages, summed in the given order.
Vector aggregate_mean(std::span<const SignMessage> messages);

/// Tolerance on server means outside [-1, 1] before the aggregation is
/// treated as corrupted.
inline constexpr double kMeanRangeTol = 1e-12;

/// Majority vote reply: sign of the mean.
SignMessage server_reply_v1(std::span<const double> mean);

/// Unbiased reply: S_1 of the mean, clamped to [-1, 1] first.
SignMessage server_reply_v2(std::span<const double> mean, RandomStream& rng);

}  // namespace signmom
