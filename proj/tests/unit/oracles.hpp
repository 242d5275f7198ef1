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

// Reference computations written without the library's internals. Tests
// compare the library against these.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

/// Central differences with step h.
inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  Vec g(x.size());
  Vec xp = x, xm = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
    xp[i] = xm[i] = x[i];
  }
  return g;
}

/// Relative sup-norm distance, with a floor on the scale so that tiny
/// gradients are judged in absolute terms.
inline double rel_err(const Vec& a, const Vec& b, double floor = 1.0) {
  double num = 0.0, den = floor;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / den;
}

/// x <- x - eta sign(grad(x)), sign(0) = +1, `steps` times; returns every
/// iterate x_1..x_{steps+1}.
inline std::vector<Vec> sign_gd(const std::function<Vec(const Vec&)>& grad, Vec x, double eta,
                                std::size_t steps) {
  std::vector<Vec> path{x};
  for (std::size_t t = 0; t < steps; ++t) {
    const Vec g = grad(x);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= g[i] >= 0.0 ? eta : -eta;
    path.push_back(x);
  }
  return path;
}

/// Spectral norm and entrywise absolute sum of the 2-d Rosenbrock Hessian at
/// (a, b).
inline void rosenbrock2_hessian_norms(double a, double b, double& spectral, double& abs_sum) {
  const double h11 = 1200.0 * a * a - 400.0 * b + 2.0;
  const double h12 = -400.0 * a;
  const double h22 = 200.0;
  const double mean = 0.5 * (h11 + h22);
  const double rad = std::sqrt(0.25 * (h11 - h22) * (h11 - h22) + h12 * h12);
  spectral = std::max(std::abs(mean + rad), std::abs(mean - rad));
  abs_sum = std::abs(h11) + 2.0 * std::abs(h12) + std::abs(h22);
}

/// Binomial(n, p) probability mass at k.
inline double binom_pmf(std::size_t n, std::size_t k, double p) {
  const double logc = std::lgamma(double(n) + 1) - std::lgamma(double(k) + 1) -
                      std::lgamma(double(n - k) + 1);
  return std::exp(logc + double(k) * std::log(p) + double(n - k) * std::log1p(-p));
}

/// P(majority of n iid +-1 votes with P(+1) = p is +1), ties counted as +1.
inline double majority_plus(std::size_t n, double p) {
  double acc = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    if (2 * k >= n) acc += binom_pmf(n, k, p);
  }
  return acc;
}

}  // namespace oracle
