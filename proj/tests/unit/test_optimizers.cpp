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
#include "doctest.h"
#include "oracles.hpp"
#include "signmom/error.hpp"
#include "signmom/optimizers.hpp"

using namespace signmom;

TEST_CASE("first step copies the sample") {
  MomentumState s = make_momentum_state(2, 0.5);
  s.v = {123.0, -7.0};  // placeholder that must be ignored
  Vector x{0.0, 0.0};
  smm_step(s, x, Vector{2.0, -3.0}, 0.1);
  CHECK(s.v == Vector{2.0, -3.0});
  CHECK(x == Vector{-0.1, 0.1});
  CHECK(s.t == 2);
}

TEST_CASE("later steps take the convex combination") {
  MomentumState s{Vector{1.0, 0.0}, 0.5, 2};
  Vector x{1.0, 1.0};
  smm_step(s, x, Vector{0.0, 1.0}, 0.25);
  CHECK(s.v == Vector{0.5, 0.5});
  CHECK(x == Vector{0.75, 0.75});
}

TEST_CASE("beta = 1 keeps v equal to the latest sample") {
  MomentumState s = make_momentum_state(3, 1.0);
  Vector x(3, 0.0);
  RandomStream rng(1);
  for (int k = 0; k < 20; ++k) {
    Vector g{rng.normal(), rng.normal(), rng.normal()};
    smm_step(s, x, g, 0.01);
    CHECK(s.v == g);
  }
}

TEST_CASE("steps move every coordinate by exactly eta") {
  MomentumState s = make_momentum_state(4, 0.3);
  Vector x{0.5, -0.25, 1.0, 2.0};
  RandomStream rng(2);
  const double eta = 0.125;  // dyadic, so the difference is exact
  for (int k = 0; k < 200; ++k) {
    Vector g{rng.normal(), rng.normal(), 0.0, rng.normal()};
    const Vector before = x;
    smm_step(s, x, g, eta);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(x[i] - before[i]) == eta);
    const Vector b2 = x;
    baseline_signsgd_step(x, g, eta);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(x[i] - b2[i]) == eta);
  }
}

TEST_CASE("SGDM with beta = 1 is plain SGD and steps are not sign-shaped") {
  MomentumState s = make_momentum_state(2, 1.0);
  Vector x{1.0, 1.0};
  baseline_sgdm_step(s, x, Vector{0.5, -2.0}, 0.1);
  CHECK(x[0] == 1.0 - 0.1 * 0.5);
  CHECK(x[1] == 1.0 + 0.1 * 2.0);
}

TEST_CASE("non-finite gradients abort") {
  MomentumState s = make_momentum_state(1, 0.5);
  Vector x{0.0};
  CHECK_THROWS_WITH(smm_step(s, x, Vector{std::nan("")}, 0.1), doctest::Contains("aborting"));
  CHECK_THROWS(baseline_signsgd_step(x, Vector{INFINITY}, 0.1));
  CHECK_THROWS(baseline_sgdm_step(s, x, Vector{-INFINITY}, 0.1));
  CHECK_THROWS_AS(smm_step(s, x, Vector{1.0, 2.0}, 0.1), ContractViolation);
  CHECK_THROWS_AS(make_momentum_state(1, 0.0), ContractViolation);
  CHECK_THROWS_AS(make_momentum_state(1, 1.5), ContractViolation);
}

TEST_CASE("theorem schedules") {
  const auto t2 = theorem2_params(10000, 1.0, 1.0);
  CHECK(t2.eta == doctest::Approx(1e-3).epsilon(1e-14));
  CHECK(t2.beta == doctest::Approx(1e-2).epsilon(1e-14));
  const auto t1 = theorem1_params(10000, 100);
  CHECK(t1.eta == doctest::Approx(1e-4).epsilon(1e-14));
  CHECK(t1.beta == doctest::Approx(1e-2).epsilon(1e-14));
  CHECK(theorem1_params(1, 4).beta == 1.0);
  CHECK(theorem1_params(10000, 100, 3.0).eta == doctest::Approx(3e-4).epsilon(1e-14));
  CHECK_THROWS(theorem1_params(0, 1));
  CHECK_THROWS(theorem2_params(10, 0.0, 1.0));
  CHECK_THROWS(theorem2_params(10, 1.0, -1.0));
  CHECK_THROWS(theorem1_params(10, 1, 0.0));
}

TEST_CASE("T = 1 run follows the algorithm: tau = 1 and x_tau = x_1") {
  const auto q = make_separable_quadratic({1.0, 2.0});
  const auto noise = make_noise(NoiseKind::kUniform, 0.1, 2);
  const Vector x1{1.0, -1.0};
  const auto rec = run_smm(q, noise, x1, 1, 0.5, 1.0, 7);
  CHECK(rec.tau == 1);
  CHECK(rec.x_tau == x1);
  // x_2 = x_1 - eta sign(g_1).
  CHECK(rec.x_final == Vector{0.5, -0.5});
  CHECK(rec.f.size() == 1);
}

TEST_CASE("noise-free beta = 1 SMM equals an independent sign-GD loop") {
  const Vector coeffs{1.0, 2.0, 0.5, 4.0};
  const auto q = make_separable_quadratic(coeffs);
  const Vector x1{1.0, -2.0, 0.3, 0.7};
  const double eta = 0.01;
  const std::size_t T = 500;
  RunOptions opt;
  opt.store_trajectory = true;
  const auto rec = run_smm(q, make_noise_none(4), x1, T, eta, 1.0, 3, opt);
  const auto ref = oracle::sign_gd(
      [&](const oracle::Vec& x) {
        oracle::Vec g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = coeffs[i] * x[i];
        return g;
      },
      x1, eta, T);
  for (std::size_t t = 0; t < T; ++t) CHECK(rec.trajectory[t] == ref[t]);
  CHECK(rec.x_final == ref[T]);
  for (double e : rec.v_err_sq) CHECK(e == 0.0);
  // signSGD is the same method here.
  const auto s = run_single(SingleAlgorithm::kSignSgd, q, make_noise_none(4), x1, T, eta, 1.0,
                            3, opt);
  CHECK(s.trajectory == rec.trajectory);
}

TEST_CASE("noise-free SMM plateaus at the sign-GD limit cycle") {
  // On 0.5 x^2 with step eta the reference loop ends oscillating between
  // two points within eta of 0: |grad| <= eta, averaging eta/2 or so.
  const auto q = make_separable_quadratic({1.0});
  const double eta = 0.01;
  const Vector x1{0.503};
  const auto rec = run_smm(q, make_noise_none(1), x1, 2000, eta, 1.0, 1);
  const auto ref = oracle::sign_gd([](const oracle::Vec& x) { return oracle::Vec{x[0]}; }, x1,
                                   eta, 2000);
  double tail = 0.0;
  for (std::size_t t = 1500; t < 2000; ++t) tail += std::abs(ref[t][0]);
  tail /= 500;
  double lib = 0.0;
  for (std::size_t t = 1500; t < 2000; ++t) lib += rec.g_l1[t];
  lib /= 500;
  CHECK(lib == doctest::Approx(tail).epsilon(1e-12));
  CHECK(lib <= eta);
}

TEST_CASE("runs are bitwise reproducible and x_tau matches the trajectory") {
  const auto q = make_shifted_quadratic({1.0, 3.0, 0.5}, {0.2, -0.1, 0.0});
  const auto noise = make_noise(NoiseKind::kGaussianClipped, 0.5, 3);
  const Vector x1{1.0, 1.0, 1.0};
  for (std::size_t T : {1u, 2u, 10u, 97u, 1000u}) {
    RunOptions with;
    with.store_trajectory = true;
    const auto a = run_smm(q, noise, x1, T, 0.01, 0.2, 11);
    const auto b = run_smm(q, noise, x1, T, 0.01, 0.2, 11, with);
    CHECK(a.f == b.f);
    CHECK(a.g_l1 == b.g_l1);
    CHECK(a.v_err_sq == b.v_err_sq);
    CHECK(a.tau == b.tau);
    CHECK(a.x_final == b.x_final);
    CHECK(a.x_tau == b.x_tau);
    CHECK(b.x_tau == b.trajectory[b.tau - 1]);
    CHECK(a.tau >= 1);
    CHECK(a.tau <= T);
    CHECK(a.f.size() == T);
  }
}

TEST_CASE("tau is uniform over 1..T") {
  const auto q = make_separable_quadratic({1.0});
  const std::size_t T = 4;
  std::vector<int> hits(T + 1, 0);
  const int runs = 4000;
  for (int s = 0; s < runs; ++s) hits[run_smm(q, make_noise_none(1), Vector{1.0}, T, 0.1, 1.0, s).tau]++;
  for (std::size_t k = 1; k <= T; ++k) {
    CHECK(std::abs(hits[k] / double(runs) - 0.25) <= 4.0 * std::sqrt(0.25 * 0.75 / runs));
  }
}

TEST_CASE("metric integrity and exact-gradient metrics") {
  const std::size_t d = 5;
  const auto q = make_separable_quadratic(Vector{1, 2, 3, 4, 5});
  const auto noise = make_noise(NoiseKind::kUniform, 1.0, d);
  RunOptions opt;
  opt.store_trajectory = true;
  const auto rec = run_smm(q, noise, Vector(d, 1.0), 300, 0.01, 0.1, 5, opt);
  for (std::size_t t = 0; t < 300; ++t) {
    CHECK(rec.g_l1[t] >= rec.g_l2[t]);
    CHECK(rec.g_l2[t] >= rec.g_l1[t] / std::sqrt(double(d)) * (1 - 1e-15));
    const Vector g = eval_grad(q, rec.trajectory[t]);
    CHECK(rec.g_l1[t] == norm_l1(g));
    CHECK(rec.f[t] == eval_f(q, rec.trajectory[t]));
  }
}

TEST_CASE("momentum error bound holds on average over 100 runs") {
  const std::size_t d = 8, T = 2000;
  const auto q = make_separable_quadratic(Vector(d, 1.0));
  const double sigma = 1.0;
  const auto noise = make_noise(NoiseKind::kUniform, sigma, d);
  const auto sch = theorem1_params(T, d);
  double avg = 0.0;
  for (int s = 1; s <= 100; ++s) {
    const auto rec = run_smm(q, noise, Vector(d, 0.5), T, sch.eta, sch.beta, s);
    double sum = 0.0;
    for (double e : rec.v_err_sq) sum += e;
    avg += sum / T / 100.0;
  }
  const double L = 1.0, b = sch.beta, eta = sch.eta;
  const double bound =
      1.2 * (sigma * sigma / (b * T) + 2 * eta * eta * L * L * d / (b * b) + b * sigma * sigma);
  CHECK(avg <= bound);
}

TEST_CASE("run argument checks") {
  const auto q = make_separable_quadratic({1.0});
  CHECK_THROWS(run_smm(q, make_noise_none(1), Vector{1.0}, 0, 0.1, 0.5, 1));
  CHECK_THROWS(run_smm(q, make_noise_none(1), Vector{1.0, 2.0}, 5, 0.1, 0.5, 1));
  CHECK_THROWS(run_smm(q, make_noise_none(1), Vector{1.0}, 5, -0.1, 0.5, 1));
}
