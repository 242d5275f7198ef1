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
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "signmom/optimizers.hpp"
#include "signmom/problems.hpp"
#include "signmom/signops.hpp"

namespace signmom {

// Synchronous parameter-server simulation of majority-vote sign methods.
//
// Round t, node j (1-based) draws everything from
// RandomStream::derive(seed, j, t): first its stochastic gradient noise, then
// the d uniforms of S_G. The v2 server reply uses derive(seed, kServerKey, t)
// and tau uses derive(seed, kRunKey, 0). Results therefore do not depend on
// the order in which node work is scheduled.

enum class MvsmVariant { kV1, kV2 };

std::string_view to_string(MvsmVariant variant);

struct NodeState {
  std::size_t j = 1;
  MomentumState momentum;
};

/// Node-side half of a round: momentum update with a fresh stochastic
/// gradient at x, then S_G(v). Throws AssumptionViolation naming the node and
/// round when the bounded-gradient assumption fails.
SignMessage node_round(NodeState& node, std::span<const double> x,
                       const ObjectiveSpec& objective, const NoiseModel& noise, double G,
                       std::uint64_t seed, std::size_t round);

struct RoundTranscript {
  std::size_t t = 0;
  std::uint64_t uplink_bits = 0;
  std::uint64_t downlink_bits = 0;
  std::vector<SignMessage> uplink;  // node order
  Vector server_mean;
  SignMessage reply;
};

struct DistOptions {
  bool record_transcripts = false;
  /// Keeps one iterate per node and asserts that all replicas agree bit for
  /// bit after every round.
  bool check_replicas = false;
  bool store_trajectory = false;
  /// Binary per-round dump, see write_round_record.
  std::ostream* transcript_sink = nullptr;
};

struct DistRunResult {
  RunRecord record;  // v_err_sq is (1/n) sum_j ||v_t^j - grad f_j(x_t)||^2
  std::vector<RoundTranscript> transcripts;
  std::uint64_t uplink_bits = 0;
  std::uint64_t downlink_bits = 0;
};

/// Runs T rounds of majority vote sign descent with momentum. Rejects G below
/// the problem's certified bound.
DistRunResult run_mvsm(const DistributedProblem& dp, MvsmVariant variant,
                       std::span<const double> x1, std::size_t T, double eta, double beta,
                       double G, std::uint64_t seed, const DistOptions& options = {});

/// Nodes send sign(v^j) and the server replies sign(mean): the biased double
/// sign scheme. Does not use G.
DistRunResult run_double_sign_baseline(const DistributedProblem& dp,
                                       std::span<const double> x1, std::size_t T,
                                       double eta, double beta, std::uint64_t seed,
                                       const DistOptions& options = {});

/// One binary record: round index as little-endian u64, the n packed uplink
/// bitmaps in node order, then the packed downlink bitmap.
void write_round_record(std::ostream& out, std::size_t round,
                        std::span<const SignMessage> uplink, const SignMessage& reply);

/// eta = c / sqrt(T d), beta = 1/2.
StepSchedule theorem3_params(std::size_t T, std::size_t d, double c = 1.0);
/// eta = c / sqrt(n), beta = 1/2.
StepSchedule theorem3plus_params(std::size_t n, double c = 1.0);
/// eta = c min{T^{-1/2} d^{-1/2}, T^{-3/5} d^{-1/5}}, beta = eta^{2/3} d^{1/3}.
/// Rejects beta > 1.
StepSchedule theorem4_params(std::size_t T, std::size_t d, double c = 1.0);

}  // namespace signmom
