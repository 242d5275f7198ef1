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
#include <string_view>
#include <vector>

#include "signmom/problems.hpp"
#include "signmom/signops.hpp"

namespace signmom {

/// Running gradient estimator v_t. `t` is the index of the next step; the
/// first step (t == 1) overwrites v with the sampled gradient.
struct MomentumState {
  Vector v;
  double beta = 1.0;
  std::size_t t = 1;
};

MomentumState make_momentum_state(std::size_t d, double beta);

/// v <- g on the first step, else (1 - beta) v + beta g.
void update_momentum(MomentumState& state, std::span<const double> g);

/// One step of the sign-based momentum method: update v, then
/// x <- x - eta sign(v). Returns the applied sign.
SignMessage smm_step(MomentumState& state, Vector& x, std::span<const double> g,
                     double eta);

/// x <- x - eta sign(g).
SignMessage baseline_signsgd_step(Vector& x, std::span<const double> g, double eta);

/// v <- (1 - beta) v + beta g (v <- g on the first step), x <- x - eta v.
void baseline_sgdm_step(MomentumState& state, Vector& x, std::span<const double> g,
                        double eta);

struct Hyperparameters {
  double eta = 0.0;
  double beta = 1.0;
  std::size_t T = 0;
  std::uint64_t seed = 0;
};

/// Trajectory of one run. Per-step metrics are measured with the exact
/// gradient at x_t, t = 1..T, before the step is applied.
struct RunRecord {
  Vector f;
  Vector g_l1;
  Vector g_l2;
  Vector v_err_sq;
  std::size_t tau = 0;  // uniform on {1..T}
  Vector x_tau;
  Vector x_final;  // x_{T+1}
  Hyperparameters hyper;
  double wallclock = 0.0;  // seconds; never serialized
  std::vector<Vector> trajectory;  // x_1..x_T when requested
};

struct RunOptions {
  bool store_trajectory = false;
};

enum class SingleAlgorithm { kSmm, kSignSgd, kSgdm };

std::string_view to_string(SingleAlgorithm algorithm);

/// Runs T steps on one objective from the stream RandomStream(seed). Each step
/// draws one stochastic gradient; after the loop tau consumes exactly one
/// value from the same stream. x_tau is rebuilt from checkpoints when the
/// trajectory is not stored.
RunRecord run_single(SingleAlgorithm algorithm, const ObjectiveSpec& spec,
                     const NoiseModel& noise, std::span<const double> x1, std::size_t T,
                     double eta, double beta, std::uint64_t seed,
                     const RunOptions& options = {});

RunRecord run_smm(const ObjectiveSpec& spec, const NoiseModel& noise,
                  std::span<const double> x1, std::size_t T, double eta, double beta,
                  std::uint64_t seed, const RunOptions& options = {});

struct StepSchedule {
  double eta = 0.0;
  double beta = 1.0;
};

/// beta = T^{-1/2}, eta = c d^{-1/2} T^{-3/4}.
StepSchedule theorem1_params(std::size_t T, std::size_t d, double c = 1.0);

/// eta = c sqrt(delta_f / L_inf) T^{-3/4}, beta = T^{-1/2}.
StepSchedule theorem2_params(std::size_t T, double delta_f, double L_inf, double c = 1.0);

/// tau = 1 + floor(u T) for one uniform u.
std::size_t draw_tau(RandomStream& rng, std::size_t T);

}  // namespace signmom
