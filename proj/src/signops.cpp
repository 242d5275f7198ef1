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

#include "signmom/signops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "signmom/error.hpp"

namespace signmom {
namespace {

void check_mean_range(std::span<const double> mean) {
  for (std::size_t k = 0; k < mean.size(); ++k) {
    if (!(std::abs(mean[k]) <= 1.0 + kMeanRangeTol)) {
      std::ostringstream os;
      os << "corrupted aggregation: server mean component " << k << " = " << mean[k]
         << " lies outside [-1, 1]";
      throw RangeViolation(os.str());
    }
  }
}

}  // namespace

SignMessage::SignMessage(std::vector<std::int8_t> values) : values_(std::move(values)) {
  for (auto v : values_) {
    SIGNMOM_REQUIRE(v == 1 || v == -1, "SignMessage components must be +1 or -1");
  }
}

std::vector<std::uint8_t> SignMessage::pack() const {
  std::vector<std::uint8_t> bytes(packed_size(values_.size()), 0);
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (values_[k] > 0) bytes[k / 8] |= static_cast<std::uint8_t>(1u << (k % 8));
  }
  return bytes;
}

SignMessage SignMessage::unpack(std::span<const std::uint8_t> bytes, std::size_t d) {
  SIGNMOM_REQUIRE(bytes.size() == packed_size(d), "bitmap length does not match d");
  std::vector<std::int8_t> values(d);
  for (std::size_t k = 0; k < d; ++k) {
    values[k] = (bytes[k / 8] >> (k % 8)) & 1u ? 1 : -1;
  }
  return SignMessage(std::move(values));
}

SignMessage sign(std::span<const double> v) {
  require_finite(v, "sign");
  std::vector<std::int8_t> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k] < 0 ? -1 : 1;
  return SignMessage(std::move(out));
}

SignMessage unbiased_sign(std::span<const double> v, double R, RandomStream& rng) {
  SIGNMOM_REQUIRE(std::isfinite(R) && R > 0, "unbiased_sign needs R > 0");
  require_finite(v, "unbiased_sign");
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (std::abs(v[k]) > R) {
      std::ostringstream os;
      os << "range violation: |v_" << k << "| = " << std::abs(v[k]) << " > R = " << R;
      throw RangeViolation(os.str());
    }
  }
  std::vector<std::int8_t> out(v.size());
  const double inv_2R = 0.5 / R;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double p_plus = (R + v[k]) * inv_2R;
    out[k] = rng.uniform() < p_plus ? 1 : -1;
  }
  return SignMessage(std::move(out));
}

Vector aggregate_mean(std::span<const SignMessage> messages) {
  SIGNMOM_REQUIRE(!messages.empty(), "aggregate_mean needs at least one message");
  const std::size_t d = messages.front().size();
  Vector sum(d, 0.0);
  for (const SignMessage& m : messages) {
    SIGNMOM_REQUIRE(m.size() == d, "aggregate_mean: messages differ in length");
    for (std::size_t k = 0; k < d; ++k) sum[k] += m[k];
  }
  const double n = static_cast<double>(messages.size());
  for (double& s : sum) s /= n;
  return sum;
}

SignMessage server_reply_v1(std::span<const double> mean) {
  check_mean_range(mean);
  return sign(mean);
}

SignMessage server_reply_v2(std::span<const double> mean, RandomStream& rng) {
  check_mean_range(mean);
  Vector clamped(mean.begin(), mean.end());
  for (double& m : clamped) m = std::clamp(m, -1.0, 1.0);
  return unbiased_sign(clamped, 1.0, rng);
}

}  // namespace signmom
