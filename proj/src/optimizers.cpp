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

#include "signmom/optimizers.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "signmom/error.hpp"

namespace signmom {
namespace {

void require_step_args(std::size_t dim_x, std::span<const double> g, double eta) {
  SIGNMOM_REQUIRE(g.size() == dim_x, "step: gradient and iterate differ in dimension");
  SIGNMOM_REQUIRE(std::isfinite(eta) && eta > 0, "step: eta must be positive");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g[i])) {
      std::ostringstream os;
      os << "non-finite stochastic gradient component " << i << "; aborting run";
      throw std::runtime_error(os.str());
    }
  }
}

struct SingleState {
  Vector x;
  MomentumState momentum;
  RandomStream rng;
};

}  // namespace

MomentumState make_momentum_state(std::size_t d, double beta) {
  SIGNMOM_REQUIRE(beta > 0 && beta <= 1, "beta must lie in (0, 1]");
  return MomentumState{Vector(d, 0.0), beta, 1};
}

void update_momentum(MomentumState& state, std::span<const double> g) {
  SIGNMOM_REQUIRE(state.beta > 0 && state.beta <= 1, "beta must lie in (0, 1]");
  SIGNMOM_REQUIRE(state.v.size() == g.size(), "momentum and gradient differ in dimension");
  if (state.t == 1) {
    std::copy(g.begin(), g.end(), state.v.begin());
  } else {
    const double keep = 1.0 - state.beta;
    for (std::size_t i = 0; i < g.size(); ++i) {
      state.v[i] = keep * state.v[i] + state.beta * g[i];
    }
  }
  ++state.t;
}

SignMessage smm_step(MomentumState& state, Vector& x, std::span<const double> g,
                     double eta) {
  require_step_args(x.size(), g, eta);
  update_momentum(state, g);
  SignMessage s = sign(state.v);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= eta * s[i];
  return s;
}

SignMessage baseline_signsgd_step(Vector& x, std::span<const double> g, double eta) {
  require_step_args(x.size(), g, eta);
  SignMessage s = sign(g);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= eta * s[i];
  return s;
}

void baseline_sgdm_step(MomentumState& state, Vector& x, std::span<const double> g,
                        double eta) {
  require_step_args(x.size(), g, eta);
  update_momentum(state, g);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= eta * state.v[i];
}

std::string_view to_string(SingleAlgorithm algorithm) {
  switch (algorithm) {
    case SingleAlgorithm::kSmm: return "smm";
    case SingleAlgorithm::kSignSgd: return "signsgd";
    case SingleAlgorithm::kSgdm: return "sgdm";
  }
  return "?";
}

std::size_t draw_tau(RandomStream& rng, std::size_t T) {
  SIGNMOM_REQUIRE(T >= 1, "tau needs T >= 1");
  return 1 + static_cast<std::size_t>(rng.below(T));
}

RunRecord run_single(SingleAlgorithm algorithm, const ObjectiveSpec& spec,
                     const NoiseModel& noise, std::span<const double> x1, std::size_t T,
                     double eta, double beta, std::uint64_t seed,
                     const RunOptions& options) {
  SIGNMOM_REQUIRE(T >= 1, "run needs T >= 1");
  SIGNMOM_REQUIRE(x1.size() == spec.d, "x1 has wrong dimension");
  SIGNMOM_REQUIRE(std::isfinite(eta) && eta > 0, "eta must be positive");
  SIGNMOM_REQUIRE(beta > 0 && beta <= 1, "beta must lie in (0, 1]");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t d = spec.d;

  RunRecord rec;
  rec.hyper = {eta, beta, T, seed};
  rec.f.reserve(T);
  rec.g_l1.reserve(T);
  rec.g_l2.reserve(T);
  rec.v_err_sq.reserve(T);
  if (options.store_trajectory) rec.trajectory.reserve(T);

  SingleState state{Vector(x1.begin(), x1.end()), make_momentum_state(d, beta),
                    RandomStream(seed)};
  Vector g(d), grad(d);

  // Advances `s` by one step; the estimator actually used is left in
  // s.momentum.v (signSGD stores its raw sample there too).
  const auto step = [&](SingleState& s) {
    sample_stoch_grad_into(spec, noise, s.x, s.rng, g);
    switch (algorithm) {
      case SingleAlgorithm::kSmm:
        smm_step(s.momentum, s.x, g, eta);
        break;
      case SingleAlgorithm::kSignSgd:
        std::copy(g.begin(), g.end(), s.momentum.v.begin());
        ++s.momentum.t;
        baseline_signsgd_step(s.x, g, eta);
        break;
      case SingleAlgorithm::kSgdm:
        baseline_sgdm_step(s.momentum, s.x, g, eta);
        break;
    }
  };

  const std::size_t interval =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(double(T)))));
  std::vector<SingleState> checkpoints;

  for (std::size_t t = 1; t <= T; ++t) {
    if (!options.store_trajectory && (t - 1) % interval == 0) checkpoints.push_back(state);
    if (options.store_trajectory) rec.trajectory.push_back(state.x);
    eval_grad_into(spec, state.x, grad);
    rec.f.push_back(eval_f(spec, state.x));
    rec.g_l1.push_back(norm_l1(grad));
    rec.g_l2.push_back(norm_l2(grad));
    step(state);
    double err = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double e = state.momentum.v[i] - grad[i];
      err += e * e;
    }
    rec.v_err_sq.push_back(err);
  }
  rec.x_final = state.x;
  rec.tau = draw_tau(state.rng, T);

  if (options.store_trajectory) {
    rec.x_tau = rec.trajectory[rec.tau - 1];
  } else {
    SingleState replay = checkpoints[(rec.tau - 1) / interval];
    const std::size_t first = ((rec.tau - 1) / interval) * interval + 1;
    for (std::size_t t = first; t < rec.tau; ++t) step(replay);
    rec.x_tau = replay.x;
  }

  rec.wallclock =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

RunRecord run_smm(const ObjectiveSpec& spec, const NoiseModel& noise,
                  std::span<const double> x1, std::size_t T, double eta, double beta,
                  std::uint64_t seed, const RunOptions& options) {
  return run_single(SingleAlgorithm::kSmm, spec, noise, x1, T, eta, beta, seed, options);
}

StepSchedule theorem1_params(std::size_t T, std::size_t d, double c) {
  SIGNMOM_REQUIRE(T >= 1 && d >= 1, "theorem1_params: T and d must be positive");
  SIGNMOM_REQUIRE(std::isfinite(c) && c > 0, "theorem1_params: c must be positive");
  const double Td = static_cast<double>(T);
  return {c / std::sqrt(static_cast<double>(d)) * std::pow(Td, -0.75), 1.0 / std::sqrt(Td)};
}

StepSchedule theorem2_params(std::size_t T, double delta_f, double L_inf, double c) {
  SIGNMOM_REQUIRE(T >= 1, "theorem2_params: T must be positive");
  SIGNMOM_REQUIRE(std::isfinite(delta_f) && delta_f > 0,
                  "theorem2_params: delta_f must be positive");
  SIGNMOM_REQUIRE(std::isfinite(L_inf) && L_inf > 0, "theorem2_params: L_inf must be positive");
  SIGNMOM_REQUIRE(std::isfinite(c) && c > 0, "theorem2_params: c must be positive");
  const double Td = static_cast<double>(T);
  return {c * std::sqrt(delta_f / L_inf) * std::pow(Td, -0.75), 1.0 / std::sqrt(Td)};
}

}  // namespace signmom
