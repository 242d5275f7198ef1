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

#include "signmom/distsim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "signmom/error.hpp"

namespace signmom {
namespace {

enum class Scheme { kV1, kV2, kDoubleSign };

[[noreturn]] void bounded_gradient_failure(std::size_t j, std::size_t round,
                                           const std::string& detail) {
  std::ostringstream os;
  os << "bounded-gradient assumption (A9) violated at node " << j << ", round " << round
     << ": " << detail;
  throw AssumptionViolation(os.str());
}

// Node work given the exact local gradient at x. `scratch` holds the noise
// draw and then the stochastic gradient.
SignMessage node_round_with_grad(NodeState& node, std::span<const double> grad,
                                 const NoiseModel& noise, std::optional<double> G,
                                 std::uint64_t seed, std::size_t round, Vector& scratch) {
  const std::size_t d = grad.size();
  RandomStream rng = RandomStream::derive(seed, node.j, round);
  if (G) {
    for (std::size_t i = 0; i < d; ++i) {
      if (std::abs(grad[i]) + noise.radius(i) > *G) {
        std::ostringstream os;
        os << "|grad_" << i << "| + noise radius = " << std::abs(grad[i]) + noise.radius(i)
           << " exceeds G = " << *G;
        bounded_gradient_failure(node.j, round, os.str());
      }
    }
  }
  scratch.resize(d);
  sample_noise_into(noise, rng, scratch);
  for (std::size_t i = 0; i < d; ++i) {
    scratch[i] += grad[i];
    if (!std::isfinite(scratch[i])) {
      std::ostringstream os;
      os << "non-finite stochastic gradient at node " << node.j << ", round " << round
         << "; aborting run";
      throw std::runtime_error(os.str());
    }
  }
  update_momentum(node.momentum, scratch);
  if (!G) return sign(node.momentum.v);
  try {
    return unbiased_sign(node.momentum.v, *G, rng);
  } catch (const RangeViolation& e) {
    bounded_gradient_failure(node.j, round, e.what());
  }
}

struct SimState {
  Vector x;
  std::vector<NodeState> nodes;
  std::vector<Vector> replicas;
};

struct RoundOutput {
  std::vector<SignMessage> uplink;
  Vector mean;
  SignMessage reply;
};

class Simulator {
 public:
  Simulator(const DistributedProblem& dp, Scheme scheme, double eta, std::optional<double> G,
            std::uint64_t seed, bool check_replicas)
      : dp_(dp), scheme_(scheme), eta_(eta), G_(G), seed_(seed),
        check_replicas_(check_replicas), grads_(dp.n, Vector(dp.d())) {}

  // Exact local gradients at s.x from the last call to round().
  const std::vector<Vector>& grads() const { return grads_; }

  RoundOutput round(SimState& s, std::size_t t) {
    RoundOutput out;
    out.uplink.reserve(dp_.n);
    for (std::size_t j = 0; j < dp_.n; ++j) {
      eval_grad_into(dp_.nodes[j], s.x, grads_[j]);
      out.uplink.push_back(
          node_round_with_grad(s.nodes[j], grads_[j], dp_.noise, G_, seed_, t, scratch_));
    }
    out.mean = aggregate_mean(out.uplink);
    if (scheme_ == Scheme::kV2) {
      RandomStream server = RandomStream::derive(seed_, kServerKey, t);
      out.reply = server_reply_v2(out.mean, server);
    } else {
      out.reply = server_reply_v1(out.mean);
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) s.x[i] -= eta_ * out.reply[i];
    if (check_replicas_) {
      for (std::size_t j = 0; j < s.replicas.size(); ++j) {
        Vector& xj = s.replicas[j];
        for (std::size_t i = 0; i < xj.size(); ++i) xj[i] -= eta_ * out.reply[i];
        if (xj != s.x) {
          std::ostringstream os;
          os << "replica of node " << j + 1 << " diverged from the server iterate at round "
             << t;
          throw std::logic_error(os.str());
        }
      }
    }
    return out;
  }

 private:
  const DistributedProblem& dp_;
  Scheme scheme_;
  double eta_;
  std::optional<double> G_;
  std::uint64_t seed_;
  bool check_replicas_;
  std::vector<Vector> grads_;
  Vector scratch_;
};

DistRunResult simulate(const DistributedProblem& dp, Scheme scheme, std::span<const double> x1,
                       std::size_t T, double eta, double beta, std::optional<double> G,
                       std::uint64_t seed, const DistOptions& options) {
  SIGNMOM_REQUIRE(dp.n >= 1 && dp.nodes.size() == dp.n, "distributed problem has no nodes");
  SIGNMOM_REQUIRE(T >= 1, "run needs T >= 1");
  SIGNMOM_REQUIRE(x1.size() == dp.d(), "x1 has wrong dimension");
  SIGNMOM_REQUIRE(std::isfinite(eta) && eta > 0, "eta must be positive");
  SIGNMOM_REQUIRE(beta > 0 && beta <= 1, "beta must lie in (0, 1]");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t d = dp.d();
  const std::size_t n = dp.n;

  DistRunResult res;
  RunRecord& rec = res.record;
  rec.hyper = {eta, beta, T, seed};
  rec.f.reserve(T);
  rec.g_l1.reserve(T);
  rec.g_l2.reserve(T);
  rec.v_err_sq.reserve(T);
  if (options.store_trajectory) rec.trajectory.reserve(T);

  SimState state;
  state.x.assign(x1.begin(), x1.end());
  for (std::size_t j = 0; j < n; ++j) {
    state.nodes.push_back(NodeState{j + 1, make_momentum_state(d, beta)});
  }
  if (options.check_replicas) state.replicas.assign(n, state.x);

  // Replay never needs replica checks.
  Simulator sim(dp, scheme, eta, G, seed, options.check_replicas);
  Simulator replay_sim(dp, scheme, eta, G, seed, false);

  const std::size_t interval =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(double(T)))));
  std::vector<SimState> checkpoints;
  Vector grad(d);
  const double inv_n = 1.0 / static_cast<double>(n);

  for (std::size_t t = 1; t <= T; ++t) {
    if (!options.store_trajectory && (t - 1) % interval == 0) {
      SimState cp{state.x, state.nodes, {}};
      checkpoints.push_back(std::move(cp));
    }
    if (options.store_trajectory) rec.trajectory.push_back(state.x);
    rec.f.push_back(eval_f(dp, state.x));

    RoundOutput out = sim.round(state, t);

    std::fill(grad.begin(), grad.end(), 0.0);
    double err = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const Vector& gj = sim.grads()[j];
      const Vector& vj = state.nodes[j].momentum.v;
      for (std::size_t i = 0; i < d; ++i) {
        grad[i] += gj[i];
        const double e = vj[i] - gj[i];
        err += e * e;
      }
    }
    for (double& g : grad) g *= inv_n;
    rec.g_l1.push_back(norm_l1(grad));
    rec.g_l2.push_back(norm_l2(grad));
    rec.v_err_sq.push_back(err * inv_n);

    res.uplink_bits += static_cast<std::uint64_t>(n) * d;
    res.downlink_bits += d;
    if (options.transcript_sink) {
      write_round_record(*options.transcript_sink, t, out.uplink, out.reply);
    }
    if (options.record_transcripts) {
      RoundTranscript rt;
      rt.t = t;
      rt.uplink_bits = static_cast<std::uint64_t>(n) * d;
      rt.downlink_bits = d;
      rt.uplink = std::move(out.uplink);
      rt.server_mean = std::move(out.mean);
      rt.reply = std::move(out.reply);
      res.transcripts.push_back(std::move(rt));
    }
  }
  rec.x_final = state.x;
  RandomStream tau_rng = RandomStream::derive(seed, kRunKey, 0);
  rec.tau = draw_tau(tau_rng, T);

  if (options.store_trajectory) {
    rec.x_tau = rec.trajectory[rec.tau - 1];
  } else {
    const std::size_t block = (rec.tau - 1) / interval;
    SimState replay = checkpoints[block];
    for (std::size_t t = block * interval + 1; t < rec.tau; ++t) replay_sim.round(replay, t);
    rec.x_tau = replay.x;
  }

  rec.wallclock =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace

std::string_view to_string(MvsmVariant variant) {
  return variant == MvsmVariant::kV1 ? "mvsm-v1" : "mvsm-v2";
}

SignMessage node_round(NodeState& node, std::span<const double> x,
                       const ObjectiveSpec& objective, const NoiseModel& noise, double G,
                       std::uint64_t seed, std::size_t round) {
  SIGNMOM_REQUIRE(std::isfinite(G) && G > 0, "node_round needs G > 0");
  SIGNMOM_REQUIRE(node.momentum.v.size() == objective.d, "node state has wrong dimension");
  const Vector grad = eval_grad(objective, x);
  Vector scratch;
  return node_round_with_grad(node, grad, noise, G, seed, round, scratch);
}

DistRunResult run_mvsm(const DistributedProblem& dp, MvsmVariant variant,
                       std::span<const double> x1, std::size_t T, double eta, double beta,
                       double G, std::uint64_t seed, const DistOptions& options) {
  SIGNMOM_REQUIRE(std::isfinite(G) && G > 0, "G must be positive");
  const double certified = certified_gradient_bound(dp);
  if (G < certified) {
    std::ostringstream os;
    os << "bounded-gradient assumption (A9): G = " << G
       << " is below the certified bound " << certified << " for this problem";
    throw AssumptionViolation(os.str());
  }
  return simulate(dp, variant == MvsmVariant::kV1 ? Scheme::kV1 : Scheme::kV2, x1, T, eta,
                  beta, G, seed, options);
}

DistRunResult run_double_sign_baseline(const DistributedProblem& dp,
                                       std::span<const double> x1, std::size_t T,
                                       double eta, double beta, std::uint64_t seed,
                                       const DistOptions& options) {
  return simulate(dp, Scheme::kDoubleSign, x1, T, eta, beta, std::nullopt, seed, options);
}

void write_round_record(std::ostream& out, std::size_t round,
                        std::span<const SignMessage> uplink, const SignMessage& reply) {
  char header[8];
  const auto r = static_cast<std::uint64_t>(round);
  for (int b = 0; b < 8; ++b) header[b] = static_cast<char>((r >> (8 * b)) & 0xffu);
  out.write(header, 8);
  for (const SignMessage& m : uplink) {
    const auto bytes = m.pack();
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }
  const auto bytes = reply.pack();
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

StepSchedule theorem3_params(std::size_t T, std::size_t d, double c) {
  SIGNMOM_REQUIRE(T >= 1 && d >= 1, "theorem3_params: T and d must be positive");
  SIGNMOM_REQUIRE(std::isfinite(c) && c > 0, "theorem3_params: c must be positive");
  return {c / std::sqrt(static_cast<double>(T) * static_cast<double>(d)), 0.5};
}

StepSchedule theorem3plus_params(std::size_t n, double c) {
  SIGNMOM_REQUIRE(n >= 1, "theorem3plus_params: n must be positive");
  SIGNMOM_REQUIRE(std::isfinite(c) && c > 0, "theorem3plus_params: c must be positive");
  return {c / std::sqrt(static_cast<double>(n)), 0.5};
}

StepSchedule theorem4_params(std::size_t T, std::size_t d, double c) {
  SIGNMOM_REQUIRE(T >= 1 && d >= 1, "theorem4_params: T and d must be positive");
  SIGNMOM_REQUIRE(std::isfinite(c) && c > 0, "theorem4_params: c must be positive");
  const double Td = static_cast<double>(T);
  const double dd = static_cast<double>(d);
  const double eta =
      c * std::min(std::pow(Td, -0.5) * std::pow(dd, -0.5), std::pow(Td, -0.6) * std::pow(dd, -0.2));
  const double beta = std::pow(eta, 2.0 / 3.0) * std::cbrt(dd);
  if (beta > 1.0) {
    std::ostringstream os;
    os << "theorem4_params: beta = " << beta << " exceeds 1; reduce c";
    throw ContractViolation(os.str());
  }
  return {eta, beta};
}

}  // namespace signmom
