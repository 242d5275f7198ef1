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
#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "signmom/analysis.hpp"
#include "signmom/error.hpp"

using namespace signmom;

namespace {

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
  std::vector<std::uint64_t> s(count);
  std::iota(s.begin(), s.end(), first);
  return s;
}

RunRecord smm_trial(std::uint64_t seed) {
  static const auto q = make_separable_quadratic({1.0, 2.0, 4.0});
  static const auto noise = make_noise(NoiseKind::kUniform, 1.0, 3);
  return run_smm(q, noise, Vector(3, 1.0), 200, 0.01, 0.1, seed);
}

}  // namespace

TEST_CASE("plateau_level examples") {
  CHECK(plateau_level(Vector(100, 2.5), 0.25) == 2.5);
  CHECK(plateau_level(Vector{1, 2, 3, 4}, 0.5) == 3.5);
  // 1 + 1/t decreases to 1.
  Vector dec(1000);
  for (std::size_t t = 0; t < dec.size(); ++t) dec[t] = 1.0 + 1.0 / double(t + 1);
  double prev = INFINITY;
  for (double w : {0.5, 0.25, 0.1, 0.01, 0.001}) {
    const double p = plateau_level(dec, w);
    CHECK(p >= 1.0);
    CHECK(p <= prev);
    prev = p;
  }
  CHECK(plateau_level(dec, 0.001) == doctest::Approx(1.001).epsilon(1e-12));
}

TEST_CASE("plateau_level is monotone in window for eventually monotone inputs") {
  RandomStream rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    // Arbitrary prefix, then a nonincreasing tail covering the last half.
    Vector s(400);
    for (std::size_t t = 0; t < 200; ++t) s[t] = 10.0 * rng.uniform();
    double level = 5.0;
    for (std::size_t t = 200; t < 400; ++t) {
      level -= 0.02 * rng.uniform();
      s[t] = level;
    }
    double prev = INFINITY;
    for (double w = 0.5; w >= 0.0025; w -= 0.0025) {
      const double p = plateau_level(s, w);
      CHECK(p <= prev + 1e-12);
      prev = p;
    }
  }
}

TEST_CASE("plateau_level rejects bad windows") {
  CHECK_THROWS(plateau_level(Vector(10, 1.0), 0.0));
  CHECK_THROWS(plateau_level(Vector(10, 1.0), 0.6));
  CHECK_THROWS(plateau_level(Vector(3, 1.0), 0.25));
  CHECK_NOTHROW(plateau_level(Vector(4, 1.0), 0.25));
}

TEST_CASE("fit_power_law is exact on noiseless power laws") {
  const Vector T{1e2, 1e3, 1e4, 1e5};
  for (double a : {-0.5, -0.25, 0.0, 0.5, 1.0}) {
    Vector y;
    for (double t : T) y.push_back(3.0 * std::pow(t, a));
    const FitResult f = fit_power_law(T, y);
    CHECK(std::abs(f.slope - a) <= 1e-12);
    CHECK(std::abs(f.intercept - std::log(3.0)) <= 1e-11);
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  }
  const FitResult flat = fit_power_law(T, Vector(4, 0.7));
  CHECK(flat.slope == 0.0);
  CHECK(flat.r_squared == 1.0);
}

TEST_CASE("one percent noise moves the slope by less than 0.02") {
  // Worst case over many draws of eps uniform on +-1%.
  const Vector T{1e2, 1e3, 1e4, 1e5};
  RandomStream rng(4);
  double worst = 0.0;
  for (int k = 0; k < 20000; ++k) {
    Vector y;
    for (double t : T) y.push_back(std::pow(t, -0.5) * (1.0 + 0.01 * (2 * rng.uniform() - 1)));
    worst = std::max(worst, std::abs(fit_power_law(T, y).slope + 0.5));
  }
  CHECK(worst < 0.02);
  // Adversarial corners: +1% at the ends with opposite signs.
  const Vector y{std::pow(1e2, -0.5) * 1.01, std::pow(1e3, -0.5) * 1.01,
                 std::pow(1e4, -0.5) * 0.99, std::pow(1e5, -0.5) * 0.99};
  CHECK(std::abs(fit_power_law(T, y).slope + 0.5) < 0.02);
}

TEST_CASE("fit_power_law rejects degenerate input") {
  CHECK_THROWS(fit_power_law(Vector{1, 2, 3}, Vector{1, 2, 3}));
  CHECK_THROWS_AS(fit_power_law(Vector{1, 2, 3, 4}, Vector{1, 0, 3, 4}), RangeViolation);
  CHECK_THROWS_AS(fit_power_law(Vector{1, 2, 3, 4}, Vector{1, -2, 3, 4}), RangeViolation);
  CHECK_THROWS(fit_power_law(Vector{1, 1, 1, 1}, Vector{1, 2, 3, 4}));
}

TEST_CASE("aggregate is the mean with sample std") {
  const Aggregate a = aggregate(Vector{1.0, 2.0, 3.0, 4.0});
  CHECK(a.mean == 2.5);
  CHECK(a.std == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
  CHECK(a.trials == 4);
  CHECK_THROWS(aggregate(Vector{1.0}));
}

TEST_CASE("run_trials is deterministic and permutation invariant") {
  const auto seeds = seed_range(1, 40);
  const TrialResults a = run_trials(smm_trial, seeds);
  const TrialResults b = run_trials(smm_trial, seeds);
  CHECK(a.aggregate.mean == b.aggregate.mean);
  CHECK(a.aggregate.std == b.aggregate.std);
  CHECK(a.values == b.values);
  auto shuffled = seeds;
  std::reverse(shuffled.begin(), shuffled.end());
  std::rotate(shuffled.begin(), shuffled.begin() + 7, shuffled.end());
  TrialOptions opt;
  opt.threads = 3;
  const TrialResults c = run_trials(smm_trial, shuffled, opt);
  CHECK(c.aggregate.mean == a.aggregate.mean);
  CHECK(c.aggregate.std == a.aggregate.std);
  // Values stay attached to their seeds.
  for (std::size_t k = 0; k < shuffled.size(); ++k) {
    CHECK(c.values[k] == a.values[shuffled[k] - 1]);
  }
}

TEST_CASE("run_trials with a deterministic run has zero spread at T = 1") {
  const auto q = make_separable_quadratic({1.0, 2.0});
  const auto run = [&](std::uint64_t s) {
    return run_smm(q, make_noise_none(2), Vector(2, 1.0), 1, 0.1, 1.0, s);
  };
  const TrialResults r = run_trials(run, seed_range(1, 10));
  CHECK(r.aggregate.std == 0.0);
  CHECK(r.aggregate.mean == 3.0);
}

TEST_CASE("run_trials needs two seeds and names the failing seed") {
  CHECK_THROWS(run_trials(smm_trial, seed_range(1, 1)));
  const auto failing = [](std::uint64_t s) -> RunRecord {
    if (s == 13) throw std::runtime_error("boom");
    return smm_trial(s);
  };
  try {
    run_trials(failing, seed_range(10, 8));
    FAIL("expected a failure");
  } catch (const TrialFailure& e) {
    CHECK(e.seed() == 13);
    CHECK(std::string(e.what()).find("seed 13") != std::string::npos);
  }
}

TEST_CASE("100 seeds agree with a 1000-seed reference") {
  const TrialResults ref = run_trials(smm_trial, seed_range(1000, 1000));
  const TrialResults small = run_trials(smm_trial, seed_range(1, 100));
  CHECK(std::abs(small.aggregate.mean - ref.aggregate.mean) <=
        4.0 * small.aggregate.std / std::sqrt(100.0));
}

TEST_CASE("extract_metric reads the record") {
  RunRecord rec;
  rec.g_l1 = {4.0, 3.0, 1.0, 2.0};
  rec.g_l2 = {2.0, 1.5, 0.5, 1.0};
  rec.tau = 2;
  CHECK(extract_metric(rec, Metric::kGradL1AtTau) == 3.0);
  CHECK(extract_metric(rec, Metric::kGradL2AtTau) == 1.5);
  CHECK(extract_metric(rec, Metric::kMinGradL1) == 1.0);
  CHECK(extract_metric(rec, Metric::kPlateauLevel, 0.5) == 1.5);
  for (Metric m : {Metric::kGradL1AtTau, Metric::kGradL2AtTau, Metric::kMinGradL1,
                   Metric::kPlateauLevel}) {
    CHECK(metric_from_string(to_string(m)) == m);
  }
  CHECK_THROWS(metric_from_string("grad"));
}

TEST_CASE("sweep invariants") {
  SweepResult s;
  s.points = {{100, 1.0, 0.1, 10}, {1000, 0.5, 0.1, 10}, {10000, 0.25, 0.1, 10},
              {100000, 0.125, 0.1, 10}};
  CHECK_NOTHROW(validate_sweep(s));
  CHECK(fit_rate(s).slope == doctest::Approx(std::log10(0.5)).epsilon(1e-12));
  s.points[2].trials = 9;
  CHECK_THROWS(validate_sweep(s));
  s.points[2].trials = 10;
  s.points[2].value = 1000;
  CHECK_THROWS(validate_sweep(s));
}

TEST_CASE("bands") {
  const Band b = band_around(-0.25);
  CHECK(b.lo == doctest::Approx(-0.35));
  CHECK(b.hi == doctest::Approx(-0.15));
  CHECK(within({-0.3, 0.0, 0.99}, b));
  CHECK_FALSE(within({-0.3, 0.0, 0.9}, b));
  CHECK_FALSE(within({-0.1, 0.0, 0.99}, b));
}
