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

#include "signmom/problems.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <cmath>
#include <numeric>
#include <sstream>

#include "signmom/error.hpp"

namespace signmom {
namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kGaussianClip = 6.0;

void require_dim(const ObjectiveSpec& spec, std::span<const double> x) {
  if (x.size() != spec.d) {
    std::ostringstream os;
    os << "dimension mismatch: objective has d=" << spec.d << ", got " << x.size();
    throw ContractViolation(os.str());
  }
}

// z = x - shift, written into `z`.
void centered(const ObjectiveSpec& spec, std::span<const double> x, std::span<double> z) {
  if (spec.shift.empty()) {
    std::copy(x.begin(), x.end(), z.begin());
  } else {
    for (std::size_t i = 0; i < spec.d; ++i) z[i] = x[i] - spec.shift[i];
  }
}

double softplus(double t) {
  return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double logistic_sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

double logistic_f(const LogisticData& data, std::size_t d, std::span<const double> z) {
  double loss = 0.0;
  for (std::size_t k = 0; k < data.samples; ++k) {
    const double* a = data.features.data() + k * d;
    double margin = 0.0;
    for (std::size_t i = 0; i < d; ++i) margin += a[i] * z[i];
    loss += softplus(-data.labels[k] * margin);
  }
  double reg = 0.0;
  for (std::size_t i = 0; i < d; ++i) reg += z[i] * z[i];
  return loss / static_cast<double>(data.samples) + 0.5 * data.reg * reg;
}

void logistic_grad(const LogisticData& data, std::size_t d, std::span<const double> z,
                   std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < data.samples; ++k) {
    const double* a = data.features.data() + k * d;
    double margin = 0.0;
    for (std::size_t i = 0; i < d; ++i) margin += a[i] * z[i];
    const double y = data.labels[k];
    const double w = -y * logistic_sigmoid(-y * margin);
    for (std::size_t i = 0; i < d; ++i) out[i] += w * a[i];
  }
  const double inv_m = 1.0 / static_cast<double>(data.samples);
  for (std::size_t i = 0; i < d; ++i) out[i] = out[i] * inv_m + data.reg * z[i];
}

double rosenbrock_f(std::span<const double> z) {
  double f = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double a = z[i + 1] - z[i] * z[i];
    const double b = 1.0 - z[i];
    f += 100.0 * a * a + b * b;
  }
  return f;
}

void rosenbrock_grad(std::span<const double> z, std::span<double> out) {
  const std::size_t d = z.size();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i + 1 < d; ++i) {
    const double a = z[i + 1] - z[i] * z[i];
    out[i] += -400.0 * z[i] * a - 2.0 * (1.0 - z[i]);
    out[i + 1] += 200.0 * a;
  }
}

// Largest eigenvalue of the 2x2 Rosenbrock Hessian and its entrywise
// absolute sum, maximized over a dense grid of the box.
std::pair<double, double> rosenbrock2_grid_constants(double box) {
  constexpr int kGrid = 801;
  double l2 = 0.0;
  double linf = 0.0;
  for (int a = 0; a < kGrid; ++a) {
    const double x = -box + 2.0 * box * a / (kGrid - 1);
    for (int b = 0; b < kGrid; ++b) {
      const double y = -box + 2.0 * box * b / (kGrid - 1);
      const double h11 = 1200.0 * x * x - 400.0 * y + 2.0;
      const double h12 = -400.0 * x;
      const double h22 = 200.0;
      const double mid = 0.5 * (h11 + h22);
      const double rad = std::sqrt(0.25 * (h11 - h22) * (h11 - h22) + h12 * h12);
      l2 = std::max(l2, std::max(std::abs(mid + rad), std::abs(mid - rad)));
      linf = std::max(linf, std::abs(h11) + 2.0 * std::abs(h12) + h22);
    }
  }
  return {l2, linf};
}

Vector gradient_descent_minimizer(std::size_t d, double L,
                                  const std::function<void(std::span<const double>,
                                                           std::span<double>)>& grad,
                                  Vector x) {
  constexpr double kTol = 1e-10;
  constexpr std::size_t kMaxIter = 5'000'000;
  Vector g(d);
  const double step = 1.0 / L;
  for (std::size_t it = 0; it < kMaxIter; ++it) {
    grad(x, g);
    if (norm_l2(g) <= kTol) return x;
    for (std::size_t i = 0; i < d; ++i) x[i] -= step * g[i];
  }
  throw std::runtime_error("gradient descent for f_star did not reach ||grad|| <= 1e-10");
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::kSeparableQuadratic: return "separable-quadratic";
    case ObjectiveKind::kShiftedQuadratic: return "shifted-quadratic";
    case ObjectiveKind::kLogisticSynthetic: return "logistic-synthetic";
    case ObjectiveKind::kRosenbrock: return "rosenbrock";
  }
  return "?";
}

ObjectiveKind objective_kind_from_string(std::string_view name) {
  if (name == "separable-quadratic") return ObjectiveKind::kSeparableQuadratic;
  if (name == "shifted-quadratic") return ObjectiveKind::kShiftedQuadratic;
  if (name == "logistic-synthetic") return ObjectiveKind::kLogisticSynthetic;
  if (name == "rosenbrock") return ObjectiveKind::kRosenbrock;
  throw SchemaError("unknown objective kind '" + std::string(name) + "'");
}

double norm_l1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double norm_l2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double norm_inf(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

void require_finite(std::span<const double> v, std::string_view what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      std::ostringstream os;
      os << what << ": non-finite component at index " << i;
      throw ContractViolation(os.str());
    }
  }
}

// ---------------------------------------------------------------------------
// Factories

ObjectiveSpec make_separable_quadratic(Vector coefficients, double box) {
  SIGNMOM_REQUIRE(!coefficients.empty(), "separable-quadratic needs d >= 1");
  SIGNMOM_REQUIRE(box > 0, "box must be positive");
  for (double c : coefficients) {
    SIGNMOM_REQUIRE(std::isfinite(c) && c >= 0, "coefficients L_i must be finite and >= 0");
  }
  ObjectiveSpec spec;
  spec.kind = ObjectiveKind::kSeparableQuadratic;
  spec.d = coefficients.size();
  spec.box = box;
  spec.L = *std::max_element(coefficients.begin(), coefficients.end());
  spec.L_inf = std::accumulate(coefficients.begin(), coefficients.end(), 0.0);
  spec.L_sep = coefficients;
  spec.coefficients = std::move(coefficients);
  spec.f_star = 0.0;
  return spec;
}

ObjectiveSpec make_shifted_quadratic(Vector coefficients, Vector shift, double box) {
  SIGNMOM_REQUIRE(shift.size() == coefficients.size(),
                  "shifted-quadratic: shift and coefficients must have equal length");
  require_finite(shift, "shift");
  ObjectiveSpec spec = make_separable_quadratic(std::move(coefficients), box);
  spec.kind = ObjectiveKind::kShiftedQuadratic;
  spec.shift = std::move(shift);
  return spec;
}

ObjectiveSpec make_logistic_synthetic(std::size_t d, std::size_t samples, double reg,
                                      std::uint64_t data_seed, double box) {
  SIGNMOM_REQUIRE(d >= 1, "logistic-synthetic needs d >= 1");
  SIGNMOM_REQUIRE(samples >= 1, "logistic-synthetic needs samples >= 1");
  SIGNMOM_REQUIRE(reg > 0, "logistic-synthetic needs reg > 0 so that f_star is attained");
  SIGNMOM_REQUIRE(box > 0, "box must be positive");

  ObjectiveSpec spec;
  spec.kind = ObjectiveKind::kLogisticSynthetic;
  spec.d = d;
  spec.box = box;
  LogisticData& data = spec.logistic;
  data.samples = samples;
  data.reg = reg;
  data.data_seed = data_seed;
  data.features.resize(samples * d);
  data.labels.resize(samples);

  RandomStream rng(data_seed);
  Vector planted(d);
  for (auto& w : planted) w = rng.normal();
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t k = 0; k < samples; ++k) {
    double margin = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double a = scale * rng.normal();
      data.features[k * d + i] = a;
      margin += a * planted[i];
    }
    double y = margin >= 0 ? 1.0 : -1.0;
    if (rng.uniform() < 0.1) y = -y;
    data.labels[k] = y;
  }

  // Hessian <= M = reg I + A^T A / (4m) in the PSD order.
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
      data.features.data(), static_cast<Eigen::Index>(samples), static_cast<Eigen::Index>(d));
  Eigen::MatrixXd M = A.transpose() * A / (4.0 * static_cast<double>(samples));
  M.diagonal().array() += reg;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M, Eigen::EigenvaluesOnly);
  // Eigenvalues are accurate to a few ulps of the norm; pad so the
  // declared constant is never below the true one.
  spec.L = eig.eigenvalues().maxCoeff() * (1.0 + 1e-12);
  // ||H||_{inf->1} <= max_s s^T M s <= sum |M_ik|.
  spec.L_inf = M.cwiseAbs().sum();

  const auto grad = [&spec](std::span<const double> x, std::span<double> g) {
    logistic_grad(spec.logistic, spec.d, x, g);
  };
  const Vector x_star = gradient_descent_minimizer(d, spec.L, grad, Vector(d, 0.0));
  spec.f_star = logistic_f(data, d, x_star);
  return spec;
}

ObjectiveSpec make_rosenbrock(std::size_t d, double box) {
  SIGNMOM_REQUIRE(d >= 2, "rosenbrock needs d >= 2");
  SIGNMOM_REQUIRE(box > 0, "box must be positive");
  ObjectiveSpec spec;
  spec.kind = ObjectiveKind::kRosenbrock;
  spec.d = d;
  spec.box = box;
  spec.f_star = 0.0;
  if (d == 2) {
    const auto [l2, linf] = rosenbrock2_grid_constants(box);
    spec.L = l2;
    spec.L_inf = linf;
  } else {
    // Gershgorin bound over the box.
    const double B = box;
    const double diag = 1200.0 * B * B + 400.0 * B + 2.0 + 200.0;
    const double off = 400.0 * B;
    spec.L = diag + 2.0 * off;
    spec.L_inf = static_cast<double>(d) * (diag + 2.0 * off);
  }
  return spec;
}

ObjectiveSpec shifted_copy(const ObjectiveSpec& base, std::span<const double> offset) {
  require_dim(base, offset);
  ObjectiveSpec spec = base;
  if (spec.shift.empty()) spec.shift.assign(base.d, 0.0);
  for (std::size_t i = 0; i < base.d; ++i) spec.shift[i] += offset[i];
  return spec;
}

// ---------------------------------------------------------------------------
// Evaluation

double eval_f(const ObjectiveSpec& spec, std::span<const double> x) {
  require_dim(spec, x);
  require_finite(x, "eval_f");
  Vector z(spec.d);
  centered(spec, x, z);
  switch (spec.kind) {
    case ObjectiveKind::kSeparableQuadratic:
    case ObjectiveKind::kShiftedQuadratic: {
      double f = 0.0;
      for (std::size_t i = 0; i < spec.d; ++i) f += spec.coefficients[i] * z[i] * z[i];
      return 0.5 * f;
    }
    case ObjectiveKind::kLogisticSynthetic:
      return logistic_f(spec.logistic, spec.d, z);
    case ObjectiveKind::kRosenbrock:
      return rosenbrock_f(z);
  }
  return 0.0;
}

void eval_grad_into(const ObjectiveSpec& spec, std::span<const double> x,
                    std::span<double> out) {
  require_dim(spec, x);
  SIGNMOM_REQUIRE(out.size() == spec.d, "eval_grad: output has wrong dimension");
  require_finite(x, "eval_grad");
  switch (spec.kind) {
    case ObjectiveKind::kSeparableQuadratic:
    case ObjectiveKind::kShiftedQuadratic:
      if (spec.shift.empty()) {
        for (std::size_t i = 0; i < spec.d; ++i) out[i] = spec.coefficients[i] * x[i];
      } else {
        for (std::size_t i = 0; i < spec.d; ++i) {
          out[i] = spec.coefficients[i] * (x[i] - spec.shift[i]);
        }
      }
      return;
    case ObjectiveKind::kLogisticSynthetic: {
      Vector z(spec.d);
      centered(spec, x, z);
      logistic_grad(spec.logistic, spec.d, z, out);
      return;
    }
    case ObjectiveKind::kRosenbrock: {
      Vector z(spec.d);
      centered(spec, x, z);
      rosenbrock_grad(z, out);
      return;
    }
  }
}

Vector eval_grad(const ObjectiveSpec& spec, std::span<const double> x) {
  Vector g(spec.d);
  eval_grad_into(spec, x, g);
  return g;
}

Vector minimizer(const ObjectiveSpec& spec) {
  Vector x(spec.d, 0.0);
  switch (spec.kind) {
    case ObjectiveKind::kSeparableQuadratic:
    case ObjectiveKind::kShiftedQuadratic:
      break;
    case ObjectiveKind::kRosenbrock:
      std::fill(x.begin(), x.end(), 1.0);
      break;
    case ObjectiveKind::kLogisticSynthetic: {
      const auto grad = [&spec](std::span<const double> z, std::span<double> g) {
        logistic_grad(spec.logistic, spec.d, z, g);
      };
      x = gradient_descent_minimizer(spec.d, spec.L, grad, x);
      break;
    }
  }
  if (!spec.shift.empty()) {
    for (std::size_t i = 0; i < spec.d; ++i) x[i] += spec.shift[i];
  }
  return x;
}

Vector gradient_bound_on_box(const ObjectiveSpec& spec) {
  const std::size_t d = spec.d;
  Vector reach(d);  // bound on |z_i| over the box
  for (std::size_t i = 0; i < d; ++i) {
    reach[i] = spec.box + (spec.shift.empty() ? 0.0 : std::abs(spec.shift[i]));
  }
  Vector bound(d, 0.0);
  switch (spec.kind) {
    case ObjectiveKind::kSeparableQuadratic:
    case ObjectiveKind::kShiftedQuadratic:
      for (std::size_t i = 0; i < d; ++i) bound[i] = spec.coefficients[i] * reach[i];
      break;
    case ObjectiveKind::kLogisticSynthetic: {
      const LogisticData& data = spec.logistic;
      for (std::size_t k = 0; k < data.samples; ++k) {
        for (std::size_t i = 0; i < d; ++i) bound[i] += std::abs(data.features[k * d + i]);
      }
      for (std::size_t i = 0; i < d; ++i) {
        bound[i] = bound[i] / static_cast<double>(data.samples) + data.reg * reach[i];
      }
      break;
    }
    case ObjectiveKind::kRosenbrock:
      for (std::size_t i = 0; i < d; ++i) {
        const double zi = reach[i];
        if (i + 1 < d) bound[i] += 400.0 * zi * (reach[i + 1] + zi * zi) + 2.0 * (1.0 + zi);
        if (i > 0) bound[i] += 200.0 * (zi + reach[i - 1] * reach[i - 1]);
      }
      break;
  }
  return bound;
}

// ---------------------------------------------------------------------------
// Noise

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kNone: return "none";
    case NoiseKind::kGaussianClipped: return "gaussian-clipped";
    case NoiseKind::kUniform: return "uniform";
    case NoiseKind::kRademacherScale: return "rademacher-scale";
  }
  return "?";
}

NoiseKind noise_kind_from_string(std::string_view name) {
  if (name == "none") return NoiseKind::kNone;
  if (name == "gaussian-clipped") return NoiseKind::kGaussianClipped;
  if (name == "uniform") return NoiseKind::kUniform;
  if (name == "rademacher-scale") return NoiseKind::kRademacherScale;
  throw SchemaError("unknown noise kind '" + std::string(name) + "'");
}

double NoiseModel::radius(std::size_t i) const {
  switch (kind) {
    case NoiseKind::kNone: return 0.0;
    case NoiseKind::kUniform: return kSqrt3 * sigma_per_coord[i];
    case NoiseKind::kRademacherScale: return sigma_per_coord[i];
    case NoiseKind::kGaussianClipped: return kGaussianClip * sigma_per_coord[i];
  }
  return 0.0;
}

NoiseModel make_noise_none(std::size_t d) {
  NoiseModel noise;
  noise.kind = NoiseKind::kNone;
  noise.sigma_per_coord.assign(d, 0.0);
  return noise;
}

NoiseModel make_noise(NoiseKind kind, double sigma, std::size_t d, std::optional<double> G) {
  SIGNMOM_REQUIRE(d >= 1, "noise needs d >= 1");
  SIGNMOM_REQUIRE(std::isfinite(sigma) && sigma >= 0, "sigma must be finite and >= 0");
  NoiseModel noise =
      make_noise_per_coord(kind, Vector(d, sigma / std::sqrt(static_cast<double>(d))), G);
  noise.sigma = sigma;
  return noise;
}

NoiseModel make_noise_per_coord(NoiseKind kind, Vector sigma_per_coord,
                                std::optional<double> G) {
  for (double s : sigma_per_coord) {
    SIGNMOM_REQUIRE(std::isfinite(s) && s >= 0, "sigma_per_coord entries must be >= 0");
  }
  if (G) SIGNMOM_REQUIRE(std::isfinite(*G) && *G > 0, "G must be positive");
  NoiseModel noise;
  noise.kind = kind;
  double sq = 0.0;
  for (double s : sigma_per_coord) sq += s * s;
  noise.sigma = std::sqrt(sq);
  noise.sigma_per_coord = std::move(sigma_per_coord);
  noise.G = G;
  return noise;
}

void sample_noise_into(const NoiseModel& noise, RandomStream& rng, std::span<double> out) {
  const std::size_t d = out.size();
  switch (noise.kind) {
    case NoiseKind::kNone:
      std::fill(out.begin(), out.end(), 0.0);
      return;
    case NoiseKind::kUniform:
      for (std::size_t i = 0; i < d; ++i) {
        out[i] = kSqrt3 * noise.sigma_per_coord[i] * (2.0 * rng.uniform() - 1.0);
      }
      return;
    case NoiseKind::kRademacherScale:
      for (std::size_t i = 0; i < d; ++i) {
        out[i] = rng.uniform() < 0.5 ? -noise.sigma_per_coord[i] : noise.sigma_per_coord[i];
      }
      return;
    case NoiseKind::kGaussianClipped:
      // Symmetric truncation keeps the mean at exactly zero.
      for (std::size_t i = 0; i < d; ++i) {
        double z = rng.normal();
        while (std::abs(z) > kGaussianClip) z = rng.normal();
        out[i] = noise.sigma_per_coord[i] * z;
      }
      return;
  }
}

void sample_stoch_grad_into(const ObjectiveSpec& spec, const NoiseModel& noise,
                            std::span<const double> x, RandomStream& rng,
                            std::span<double> out) {
  SIGNMOM_REQUIRE(noise.sigma_per_coord.size() == spec.d,
                  "noise model dimension does not match objective");
  eval_grad_into(spec, x, out);
  if (noise.G) {
    for (std::size_t i = 0; i < spec.d; ++i) {
      if (std::abs(out[i]) + noise.radius(i) > *noise.G) {
        std::ostringstream os;
        os << "G-infeasible point: |grad_" << i << "| + noise radius = "
           << std::abs(out[i]) + noise.radius(i) << " exceeds G = " << *noise.G;
        throw AssumptionViolation(os.str());
      }
    }
  }
  if (noise.kind == NoiseKind::kNone) return;
  Vector e(spec.d);
  sample_noise_into(noise, rng, e);
  for (std::size_t i = 0; i < spec.d; ++i) out[i] += e[i];
}

Vector sample_stoch_grad(const ObjectiveSpec& spec, const NoiseModel& noise,
                         std::span<const double> x, RandomStream& rng) {
  Vector g(spec.d);
  sample_stoch_grad_into(spec, noise, x, rng, g);
  return g;
}

// ---------------------------------------------------------------------------
// Smoothness

SmoothnessReport certify_smoothness(const ObjectiveSpec& spec, std::size_t trials,
                                    RandomStream& rng) {
  SIGNMOM_REQUIRE(trials >= 1, "certify_smoothness needs trials >= 1");
  const std::size_t d = spec.d;
  const double B = spec.box;
  SmoothnessReport report;
  Vector x(d), y(d), gx(d), gy(d), dx(d), dg(d);

  for (std::size_t trial = 0; trial < trials; ++trial) {
    switch (trial % 3) {
      case 0:
        for (std::size_t i = 0; i < d; ++i) {
          x[i] = B * (2.0 * rng.uniform() - 1.0);
          y[i] = B * (2.0 * rng.uniform() - 1.0);
        }
        break;
      case 1: {
        for (std::size_t i = 0; i < d; ++i) x[i] = 0.5 * B * (2.0 * rng.uniform() - 1.0);
        const double h = 0.5 * B * (1.0 - rng.uniform());
        for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + (rng.uniform() < 0.5 ? -h : h);
        break;
      }
      default: {
        for (std::size_t i = 0; i < d; ++i) x[i] = 0.5 * B * (2.0 * rng.uniform() - 1.0);
        const double h = 0.5 * B * (1.0 - rng.uniform());
        y = x;
        y[rng.below(d)] += h;
        break;
      }
    }
    for (std::size_t i = 0; i < d; ++i) dx[i] = x[i] - y[i];
    const double step_l2 = norm_l2(dx);
    const double step_inf = norm_inf(dx);
    if (step_inf == 0.0) continue;
    eval_grad_into(spec, x, gx);
    eval_grad_into(spec, y, gy);
    for (std::size_t i = 0; i < d; ++i) dg[i] = gx[i] - gy[i];
    const double r2 = norm_l2(dg) / step_l2;
    const double rinf = norm_l1(dg) / step_inf;
    report.l2_ratio = std::max(report.l2_ratio, r2);
    report.linf_ratio = std::max(report.linf_ratio, rinf);
    if (r2 > spec.L * (1.0 + kRatioSlack)) ++report.l2_violations;
    if (rinf > spec.L_inf * (1.0 + kRatioSlack)) ++report.linf_violations;
    ++report.trials;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Distributed

namespace {

void finish_distributed(DistributedProblem& dp) {
  dp.n = dp.shifts.size();
  dp.nodes.clear();
  dp.nodes.reserve(dp.n);
  for (const Vector& c : dp.shifts) dp.nodes.push_back(shifted_copy(dp.base, c));
  dp.L = dp.base.L;
  dp.L_inf = dp.base.L_inf;

  switch (dp.base.kind) {
    case ObjectiveKind::kSeparableQuadratic:
    case ObjectiveKind::kShiftedQuadratic: {
      // The mean of shifted quadratics with a common curvature is minimized
      // at the mean shift.
      Vector center(dp.d(), 0.0);
      for (const ObjectiveSpec& node : dp.nodes) {
        for (std::size_t i = 0; i < dp.d(); ++i) center[i] += node.shift[i];
      }
      for (double& c : center) c /= static_cast<double>(dp.n);
      dp.f_star = eval_f(dp, center);
      return;
    }
    case ObjectiveKind::kLogisticSynthetic: {
      const auto grad = [&dp](std::span<const double> x, std::span<double> g) {
        eval_grad_into(dp, x, g);
      };
      Vector start(dp.d(), 0.0);
      for (const Vector& c : dp.shifts) {
        for (std::size_t i = 0; i < dp.d(); ++i) start[i] += c[i] / static_cast<double>(dp.n);
      }
      const Vector x_star = gradient_descent_minimizer(dp.d(), dp.L, grad, start);
      dp.f_star = eval_f(dp, x_star);
      return;
    }
    case ObjectiveKind::kRosenbrock: {
      for (const Vector& c : dp.shifts) {
        SIGNMOM_REQUIRE(c == dp.shifts.front(),
                        "heterogeneous rosenbrock nodes have no known f_star");
      }
      dp.f_star = 0.0;
      return;
    }
  }
}

}  // namespace

DistributedProblem make_distributed(const ObjectiveSpec& base, const NoiseModel& noise,
                                    std::size_t n, double heterogeneity,
                                    std::uint64_t seed) {
  SIGNMOM_REQUIRE(n >= 1, "distributed problem needs n >= 1");
  SIGNMOM_REQUIRE(std::isfinite(heterogeneity) && heterogeneity >= 0,
                  "heterogeneity must be >= 0");
  const std::size_t d = base.d;
  std::vector<Vector> shifts(n, Vector(d, 0.0));
  if (heterogeneity > 0) {
    for (std::size_t j = 0; j < n; ++j) {
      RandomStream rng = RandomStream::derive(seed, kShiftKey, j + 1);
      Vector& c = shifts[j];
      double len = 0.0;
      do {
        for (auto& ci : c) ci = rng.normal();
        len = norm_l2(c);
      } while (len == 0.0);
      const double radius =
          heterogeneity * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
      for (auto& ci : c) ci *= radius / len;
    }
  }
  DistributedProblem dp = make_distributed_with_shifts(base, noise, std::move(shifts));
  dp.heterogeneity = heterogeneity;
  dp.seed = seed;
  return dp;
}

DistributedProblem make_distributed_with_shifts(const ObjectiveSpec& base,
                                                const NoiseModel& noise,
                                                std::vector<Vector> shifts) {
  SIGNMOM_REQUIRE(!shifts.empty(), "distributed problem needs n >= 1");
  SIGNMOM_REQUIRE(noise.sigma_per_coord.size() == base.d,
                  "noise model dimension does not match objective");
  double het = 0.0;
  for (const Vector& c : shifts) {
    SIGNMOM_REQUIRE(c.size() == base.d, "node shift has wrong dimension");
    require_finite(c, "node shift");
    het = std::max(het, norm_l2(c));
  }
  DistributedProblem dp;
  dp.base = base;
  dp.noise = noise;
  dp.shifts = std::move(shifts);
  dp.heterogeneity = het;
  finish_distributed(dp);
  return dp;
}

double eval_f(const DistributedProblem& dp, std::span<const double> x) {
  double f = 0.0;
  for (const ObjectiveSpec& node : dp.nodes) f += eval_f(node, x);
  return f / static_cast<double>(dp.n);
}

void eval_grad_into(const DistributedProblem& dp, std::span<const double> x,
                    std::span<double> out) {
  SIGNMOM_REQUIRE(out.size() == dp.d(), "eval_grad: output has wrong dimension");
  std::fill(out.begin(), out.end(), 0.0);
  Vector g(dp.d());
  for (const ObjectiveSpec& node : dp.nodes) {
    eval_grad_into(node, x, g);
    for (std::size_t i = 0; i < dp.d(); ++i) out[i] += g[i];
  }
  const double inv_n = 1.0 / static_cast<double>(dp.n);
  for (double& v : out) v *= inv_n;
}

Vector eval_grad(const DistributedProblem& dp, std::span<const double> x) {
  Vector g(dp.d());
  eval_grad_into(dp, x, g);
  return g;
}

double certified_gradient_bound(const ObjectiveSpec& spec, const NoiseModel& noise) {
  const Vector bound = gradient_bound_on_box(spec);
  double G = 0.0;
  for (std::size_t i = 0; i < spec.d; ++i) G = std::max(G, bound[i] + noise.radius(i));
  return G;
}

double certified_gradient_bound(const DistributedProblem& dp) {
  double G = 0.0;
  for (const ObjectiveSpec& node : dp.nodes) {
    G = std::max(G, certified_gradient_bound(node, dp.noise));
  }
  return G;
}

}  // namespace signmom
