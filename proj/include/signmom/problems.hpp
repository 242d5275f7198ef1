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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "signmom/rng.hpp"

namespace signmom {

using Vector = std::vector<double>;

enum class ObjectiveKind {
  kSeparableQuadratic,  // f(x) = 1/2 sum_i L_i x_i^2
  kShiftedQuadratic,    // f(x) = 1/2 sum_i L_i (x_i - c_i)^2
  kLogisticSynthetic,   // regularized logistic loss on seeded Gaussian data
  kRosenbrock,          // sum_i 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2
};

std::string_view to_string(ObjectiveKind kind);
ObjectiveKind objective_kind_from_string(std::string_view name);

/// Synthetic binary classification data. Rows of `features` are a_k (m x d,
/// row-major); labels are +-1.
struct LogisticData {
  std::size_t samples = 0;
  double reg = 0.0;
  std::uint64_t data_seed = 0;
  Vector features;
  Vector labels;
};

/// A differentiable test function with certified constants.
///
/// Every kind is evaluated at z = x - shift (shift empty means zero). For
/// kShiftedQuadratic the shift is the kind's own parameter; for the other
/// kinds it is only set on per-node objectives of a DistributedProblem.
///
/// `box` is the half-width of the certified region [-box, box]^d. It bounds
/// the random probes of certify_smoothness and the G-feasibility check;
/// quadratic and logistic objectives are globally smooth and the box only
/// matters for the gradient bound.
struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::kSeparableQuadratic;
  std::size_t d = 0;
  Vector coefficients;  // quadratics: L_1..L_d
  Vector shift;
  LogisticData logistic;
  double box = 1.0;

  double f_star = 0.0;
  double L = 0.0;
  double L_inf = 0.0;
  std::optional<Vector> L_sep;
};

ObjectiveSpec make_separable_quadratic(Vector coefficients, double box = 10.0);
ObjectiveSpec make_shifted_quadratic(Vector coefficients, Vector shift,
                                     double box = 10.0);
/// `samples` rows, features N(0, 1/d), labels from a seeded planted model
/// with 10% label flips. f_star is found by full-gradient descent to
/// ||grad f|| <= 1e-10.
ObjectiveSpec make_logistic_synthetic(std::size_t d, std::size_t samples,
                                      double reg, std::uint64_t data_seed,
                                      double box = 5.0);
ObjectiveSpec make_rosenbrock(std::size_t d, double box = 2.0);

/// Returns a copy of `base` whose minimizer is moved by `offset`.
ObjectiveSpec shifted_copy(const ObjectiveSpec& base, std::span<const double> offset);

double eval_f(const ObjectiveSpec& spec, std::span<const double> x);
Vector eval_grad(const ObjectiveSpec& spec, std::span<const double> x);
void eval_grad_into(const ObjectiveSpec& spec, std::span<const double> x,
                    std::span<double> out);

/// A point where the gradient vanishes. Exact for quadratics and Rosenbrock;
/// for logistic it is the descent iterate used to compute f_star.
Vector minimizer(const ObjectiveSpec& spec);

/// Upper bound on sup_{x in box} ||grad f(x)||_inf, per coordinate.
Vector gradient_bound_on_box(const ObjectiveSpec& spec);

// ---------------------------------------------------------------------------
// Noise

enum class NoiseKind { kNone, kGaussianClipped, kUniform, kRademacherScale };

std::string_view to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(std::string_view name);

/// Additive zero-mean noise with bounded support.
///
///   uniform           e_i ~ U[-sqrt(3) s_i, sqrt(3) s_i]    E e_i^2 = s_i^2
///   rademacher-scale  e_i = +-s_i                           E e_i^2 = s_i^2
///   gaussian-clipped  e_i = s_i z, z ~ N(0,1) | |z| <= 6    E e_i^2 < s_i^2
///
/// sigma is the global bound with sigma^2 >= sum_i s_i^2.
struct NoiseModel {
  NoiseKind kind = NoiseKind::kNone;
  double sigma = 0.0;
  Vector sigma_per_coord;
  std::optional<double> G;

  /// Largest possible |e_i|.
  double radius(std::size_t i) const;
};

NoiseModel make_noise_none(std::size_t d);
/// Splits a global sigma evenly: s_i = sigma / sqrt(d).
NoiseModel make_noise(NoiseKind kind, double sigma, std::size_t d,
                      std::optional<double> G = std::nullopt);
NoiseModel make_noise_per_coord(NoiseKind kind, Vector sigma_per_coord,
                                std::optional<double> G = std::nullopt);

/// Draws one noise vector. Stream consumption: d draws for uniform and
/// rademacher, a variable number for gaussian-clipped, none for kNone.
void sample_noise_into(const NoiseModel& noise, RandomStream& rng,
                       std::span<double> out);

/// grad f(x) + e. Throws AssumptionViolation("G-infeasible point") when G is
/// set and some |grad_i f(x)| + radius_i > G, since the bounded-gradient
/// promise could then be broken by a noise draw.
Vector sample_stoch_grad(const ObjectiveSpec& spec, const NoiseModel& noise,
                         std::span<const double> x, RandomStream& rng);
void sample_stoch_grad_into(const ObjectiveSpec& spec, const NoiseModel& noise,
                            std::span<const double> x, RandomStream& rng,
                            std::span<double> out);

// ---------------------------------------------------------------------------
// Smoothness certification

struct SmoothnessReport {
  double l2_ratio = 0.0;    // max ||g(x)-g(y)||_2 / ||x-y||_2
  double linf_ratio = 0.0;  // max ||g(x)-g(y)||_1 / ||x-y||_inf
  std::size_t trials = 0;
  std::size_t l2_violations = 0;
  std::size_t linf_violations = 0;
};

/// Relative slack allowed when comparing an empirical ratio against a
/// declared constant; absorbs rounding in the gradient differences.
inline constexpr double kRatioSlack = 1e-12;

/// Probes random pairs inside the certified box. Trials cycle through three
/// pair shapes: independent uniform points, a step along a random corner of
/// the l_inf ball (maximizes the l_inf ratio of separable functions), and a
/// step along a random axis (exposes the largest per-coordinate curvature).
SmoothnessReport certify_smoothness(const ObjectiveSpec& spec, std::size_t trials,
                                    RandomStream& rng);

// ---------------------------------------------------------------------------
// Distributed

/// f(x) = (1/n) sum_j f_j(x), node j minimizing base(x - c_j).
struct DistributedProblem {
  std::size_t n = 0;
  ObjectiveSpec base;
  std::vector<ObjectiveSpec> nodes;
  NoiseModel noise;
  double heterogeneity = 0.0;
  std::uint64_t seed = 0;
  std::vector<Vector> shifts;

  // Constants of the global objective.
  double f_star = 0.0;
  double L = 0.0;
  double L_inf = 0.0;

  std::size_t d() const { return base.d; }
};

/// Draws c_j uniformly from the ball of radius `heterogeneity` using the
/// stream derive(seed, kShiftKey, j).
DistributedProblem make_distributed(const ObjectiveSpec& base, const NoiseModel& noise,
                                    std::size_t n, double heterogeneity,
                                    std::uint64_t seed);
DistributedProblem make_distributed_with_shifts(const ObjectiveSpec& base,
                                                const NoiseModel& noise,
                                                std::vector<Vector> shifts);

/// Global objective, accumulated over nodes in ascending index order.
double eval_f(const DistributedProblem& dp, std::span<const double> x);
Vector eval_grad(const DistributedProblem& dp, std::span<const double> x);
void eval_grad_into(const DistributedProblem& dp, std::span<const double> x,
                    std::span<double> out);

/// Smallest G for which every node satisfies the bounded-gradient assumption
/// over the certified box, including the noise radius.
double certified_gradient_bound(const DistributedProblem& dp);
double certified_gradient_bound(const ObjectiveSpec& spec, const NoiseModel& noise);

// ---------------------------------------------------------------------------
// Vector helpers

double norm_l1(std::span<const double> v);
double norm_l2(std::span<const double> v);
double norm_inf(std::span<const double> v);
void require_finite(std::span<const double> v, std::string_view what);

}  // namespace signmom
