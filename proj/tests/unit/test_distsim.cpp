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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>

#include "doctest.h"
#include "signmom/distsim.hpp"
#include "signmom/error.hpp"

using namespace signmom;

namespace {

DistributedProblem toy_problem() {
  // grad f_1 = x + 2, grad f_2 = x - 1: +2 and -1 at x = 0.
  const auto base = make_shifted_quadratic({1.0}, {0.0}, 1.0);
  return make_distributed_with_shifts(base, make_noise_none(1), {{-2.0}, {1.0}});
}

DistributedProblem hetero(std::size_t n, std::size_t d, double sigma = 1.0) {
  const auto base = make_shifted_quadratic(Vector(d, 1.0), Vector(d, 0.0), 2.0);
  return make_distributed(base, make_noise(NoiseKind::kUniform, sigma, d), n, 1.0, 42);
}

std::uint64_t read_u64(const std::string& s, std::size_t at) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= std::uint64_t(static_cast<unsigned char>(s[at + b])) << (8 * b);
  return v;
}

}  // namespace

TEST_CASE("node_round uses the node's stream: noise first, then S_G") {
  const auto dp = hetero(3, 4);
  const double G = certified_gradient_bound(dp);
  const Vector x{0.1, -0.2, 0.3, 0.0};
  NodeState node{2, make_momentum_state(4, 0.5)};
  const SignMessage m = node_round(node, x, dp.nodes[1], dp.noise, G, 99, 5);

  RandomStream rng = RandomStream::derive(99, 2, 5);
  Vector e(4);
  sample_noise_into(dp.noise, rng, e);
  Vector g = eval_grad(dp.nodes[1], x);
  for (int i = 0; i < 4; ++i) g[i] += e[i];
  CHECK(node.momentum.v == g);
  CHECK(unbiased_sign(g, G, rng) == m);
}

TEST_CASE("node_round reports the node and round on a broken G bound") {
  const auto dp = hetero(2, 2);
  NodeState node{1, make_momentum_state(2, 0.5)};
  CHECK_THROWS_WITH_AS(node_round(node, Vector{0.0, 0.0}, dp.nodes[0], dp.noise, 0.5, 1, 7),
                       doctest::Contains("node 1, round 7"), AssumptionViolation);
}

TEST_CASE("communication ledger counts n d uplink and d downlink bits per round") {
  const auto dp = hetero(8, 32);
  const double G = certified_gradient_bound(dp);
  for (MvsmVariant v : {MvsmVariant::kV1, MvsmVariant::kV2}) {
    DistOptions opt;
    opt.record_transcripts = true;
    const auto r = run_mvsm(dp, v, Vector(32, 0.0), 100, 0.01, 0.5, G, 1, opt);
    CHECK(r.uplink_bits == 25600);
    CHECK(r.downlink_bits == 3200);
    REQUIRE(r.transcripts.size() == 100);
    for (const auto& rt : r.transcripts) {
      CHECK(rt.uplink_bits == 8 * 32);
      CHECK(rt.downlink_bits == 32);
      std::uint64_t counted = 0;
      for (const auto& m : rt.uplink) counted += m.bit_cost();
      CHECK(counted == rt.uplink_bits);
      CHECK(rt.reply.bit_cost() == rt.downlink_bits);
      CHECK(aggregate_mean(rt.uplink) == rt.server_mean);
    }
  }
  const auto b = run_double_sign_baseline(dp, Vector(32, 0.0), 100, 0.01, 0.5, 1);
  CHECK(b.uplink_bits == 25600);
  CHECK(b.downlink_bits == 3200);
}

TEST_CASE("v1 replies are the sign of the mean; n = 1 echoes the node") {
  const auto dp1 = hetero(1, 6);
  DistOptions opt;
  opt.record_transcripts = true;
  const auto r = run_mvsm(dp1, MvsmVariant::kV1, Vector(6, 0.5), 50, 0.01, 0.5,
                          certified_gradient_bound(dp1), 3, opt);
  for (const auto& rt : r.transcripts) CHECK(rt.reply == rt.uplink[0]);
  const auto dp = hetero(4, 6);
  const auto r4 = run_mvsm(dp, MvsmVariant::kV1, Vector(6, 0.5), 50, 0.01, 0.5,
                           certified_gradient_bound(dp), 3, opt);
  for (const auto& rt : r4.transcripts) CHECK(rt.reply == sign(rt.server_mean));
}

TEST_CASE("replicas stay identical and runs are reproducible") {
  const auto dp = hetero(5, 4);
  const double G = certified_gradient_bound(dp);
  DistOptions opt;
  opt.check_replicas = true;
  const auto a = run_mvsm(dp, MvsmVariant::kV2, Vector(4, 0.0), 300, 0.01, 0.3, G, 17, opt);
  const auto b = run_mvsm(dp, MvsmVariant::kV2, Vector(4, 0.0), 300, 0.01, 0.3, G, 17);
  CHECK(a.record.g_l1 == b.record.g_l1);
  CHECK(a.record.v_err_sq == b.record.v_err_sq);
  CHECK(a.record.x_final == b.record.x_final);
  CHECK(a.record.tau == b.record.tau);
  const auto c = run_mvsm(dp, MvsmVariant::kV2, Vector(4, 0.0), 300, 0.01, 0.3, G, 18);
  CHECK(c.record.g_l1 != a.record.g_l1);
}

TEST_CASE("x_tau rebuilt from checkpoints equals the stored trajectory") {
  const auto dp = hetero(3, 3);
  const double G = certified_gradient_bound(dp);
  for (std::size_t T : {1u, 5u, 64u, 101u}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      DistOptions with;
      with.store_trajectory = true;
      const auto a = run_mvsm(dp, MvsmVariant::kV1, Vector(3, 0.2), T, 0.02, 0.5, G, seed);
      const auto b = run_mvsm(dp, MvsmVariant::kV1, Vector(3, 0.2), T, 0.02, 0.5, G, seed, with);
      CHECK(a.record.x_tau == b.record.x_tau);
      CHECK(b.record.x_tau == b.record.trajectory[b.record.tau - 1]);
    }
  }
}

TEST_CASE("metrics use the exact global gradient and per-node estimator error") {
  const auto base = make_shifted_quadratic(Vector(3, 1.0), Vector(3, 0.0), 2.0);
  const auto dp = make_distributed(base, make_noise_none(3), 4, 1.0, 8);
  DistOptions opt;
  opt.store_trajectory = true;
  const auto r = run_mvsm(dp, MvsmVariant::kV2, Vector(3, 0.1), 200, 0.01, 1.0,
                          certified_gradient_bound(dp), 2, opt);
  for (std::size_t t = 0; t < 200; ++t) {
    const Vector g = eval_grad(dp, r.record.trajectory[t]);
    CHECK(r.record.g_l1[t] == norm_l1(g));
    CHECK(r.record.g_l2[t] == norm_l2(g));
    CHECK(r.record.f[t] == eval_f(dp, r.record.trajectory[t]));
    // Noise-free, beta = 1: v^j is the exact local gradient.
    CHECK(r.record.v_err_sq[t] == 0.0);
  }
}

TEST_CASE("binary transcript layout") {
  const auto dp = hetero(3, 10);
  std::ostringstream bin;
  DistOptions opt;
  opt.record_transcripts = true;
  opt.transcript_sink = &bin;
  const auto r = run_mvsm(dp, MvsmVariant::kV2, Vector(10, 0.0), 20, 0.01, 0.5,
                          certified_gradient_bound(dp), 4, opt);
  const std::string s = bin.str();
  const std::size_t bytes = SignMessage::packed_size(10);
  const std::size_t rec = 8 + 3 * bytes + bytes;
  REQUIRE(s.size() == 20 * rec);
  for (std::size_t t = 0; t < 20; ++t) {
    const std::size_t at = t * rec;
    CHECK(read_u64(s, at) == t + 1);
    for (std::size_t j = 0; j < 3; ++j) {
      std::vector<std::uint8_t> raw(s.begin() + at + 8 + j * bytes,
                                    s.begin() + at + 8 + (j + 1) * bytes);
      CHECK(SignMessage::unpack(raw, 10) == r.transcripts[t].uplink[j]);
    }
    std::vector<std::uint8_t> raw(s.begin() + at + 8 + 3 * bytes, s.begin() + at + rec);
    CHECK(SignMessage::unpack(raw, 10) == r.transcripts[t].reply);
  }
}

TEST_CASE("G below the certified bound is rejected at startup") {
  const auto dp = hetero(2, 2);
  const double G = certified_gradient_bound(dp);
  CHECK_THROWS_AS(run_mvsm(dp, MvsmVariant::kV1, Vector(2, 0.0), 10, 0.01, 0.5, 0.9 * G, 1),
                  AssumptionViolation);
  CHECK_NOTHROW(run_mvsm(dp, MvsmVariant::kV1, Vector(2, 0.0), 10, 0.01, 0.5, G, 1));
}

TEST_CASE("heterogeneous toy: double sign is stuck on the tie rule, v2 is unbiased") {
  const auto dp = toy_problem();
  DistOptions opt;
  opt.record_transcripts = true;
  const auto b = run_double_sign_baseline(dp, Vector{0.0}, 1000, 1e-6, 1.0, 1, opt);
  for (const auto& rt : b.transcripts) {
    CHECK(rt.server_mean[0] == 0.0);
    CHECK(rt.reply[0] == 1);
  }
  const double G = 4.0;
  const std::size_t T = 20000;
  const auto v2 = run_mvsm(dp, MvsmVariant::kV2, Vector{0.0}, T, 1e-9, 1.0, G, 1, opt);
  double mean = 0.0;
  for (const auto& rt : v2.transcripts) mean += rt.reply[0];
  mean /= T;
  CHECK(std::abs(mean - 1.0 / (2.0 * G)) <= 4.0 / std::sqrt(double(T)));
}

TEST_CASE("distributed schedules") {
  const auto s3 = theorem3_params(10000, 16);
  CHECK(s3.eta == doctest::Approx(1.0 / 400.0).epsilon(1e-14));
  CHECK(s3.beta == 0.5);
  const auto s3p = theorem3plus_params(16, 2.0);
  CHECK(s3p.eta == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s3p.beta == 0.5);
  // d = 1: T^{-1/2} vs T^{-3/5}, the second is smaller for T > 1.
  const auto s4 = theorem4_params(100000, 1);
  CHECK(s4.eta == doctest::Approx(std::pow(1e5, -0.6)).epsilon(1e-12));
  CHECK(s4.beta == doctest::Approx(std::pow(s4.eta, 2.0 / 3.0)).epsilon(1e-12));
  // d = 16, T = 100: the first branch is smaller.
  const auto s4b = theorem4_params(100, 16);
  CHECK(s4b.eta == doctest::Approx(0.1 / 4.0).epsilon(1e-12));
  CHECK_THROWS_AS(theorem4_params(1, 16, 10.0), ContractViolation);
  CHECK_THROWS(theorem3_params(0, 1));
  CHECK_THROWS(theorem3plus_params(0));
}
