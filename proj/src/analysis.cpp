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

#include "signmom/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "signmom/error.hpp"

namespace signmom {

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kGradL1AtTau: return "grad_l1_at_tau";
    case Metric::kGradL2AtTau: return "grad_l2_at_tau";
    case Metric::kMinGradL1: return "min_grad_l1";
    case Metric::kPlateauLevel: return "plateau_level";
  }
  return "?";
}

Metric metric_from_string(std::string_view name) {
  for (Metric m : {Metric::kGradL1AtTau, Metric::kGradL2AtTau, Metric::kMinGradL1,
                   Metric::kPlateauLevel}) {
    if (name == to_string(m)) return m;
  }
  throw ContractViolation("unknown metric '" + std::string(name) + "'");
}

double plateau_level(std::span<const double> series, double window) {
  SIGNMOM_REQUIRE(window > 0 && window <= 0.5, "plateau window must lie in (0, 0.5]");
  const double covered = window * static_cast<double>(series.size());
  SIGNMOM_REQUIRE(covered >= 1.0, "plateau window covers less than one step (T * window < 1)");
  const auto count = static_cast<std::size_t>(std::floor(covered));
  double sum = 0.0;
  for (std::size_t i = series.size() - count; i < series.size(); ++i) sum += series[i];
  return sum / static_cast<double>(count);
}

double extract_metric(const RunRecord& record, Metric metric, double window) {
  SIGNMOM_REQUIRE(!record.g_l1.empty(), "run record has no steps");
  switch (metric) {
    case Metric::kGradL1AtTau:
      SIGNMOM_REQUIRE(record.tau >= 1 && record.tau <= record.g_l1.size(), "tau out of range");
      return record.g_l1[record.tau - 1];
    case Metric::kGradL2AtTau:
      SIGNMOM_REQUIRE(record.tau >= 1 && record.tau <= record.g_l2.size(), "tau out of range");
      return record.g_l2[record.tau - 1];
    case Metric::kMinGradL1:
      return *std::min_element(record.g_l1.begin(), record.g_l1.end());
    case Metric::kPlateauLevel:
      return plateau_level(record.g_l1, window);
  }
  return 0.0;
}

Aggregate aggregate(std::span<const double> values) {
  SIGNMOM_REQUIRE(values.size() >= 2, "aggregate needs at least two values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double sum = 0.0;
  for (double v : sorted) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : sorted) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0)), sorted.size()};
}

TrialFailure::TrialFailure(std::uint64_t seed, const std::string& what)
    : std::runtime_error("trial with seed " + std::to_string(seed) + " failed: " + what),
      seed_(seed) {}

TrialResults run_trials(const TrialFn& run, std::span<const std::uint64_t> seeds,
                        const TrialOptions& options) {
  SIGNMOM_REQUIRE(seeds.size() >= 2, "run_trials needs at least two seeds");
  const std::size_t count = seeds.size();
  TrialResults out;
  out.seeds.assign(seeds.begin(), seeds.end());
  out.values.assign(count, 0.0);
  if (options.keep_records) out.records.resize(count);
  std::vector<std::exception_ptr> errors(count);

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        RunRecord rec = run(seeds[k]);
        out.values[k] = extract_metric(rec, options.metric, options.window);
        if (options.keep_records) out.records[k] = std::move(rec);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::size_t threads = options.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  for (std::size_t k = 0; k < count; ++k) {
    if (!errors[k]) continue;
    try {
      std::rethrow_exception(errors[k]);
    } catch (const std::exception& e) {
      throw TrialFailure(seeds[k], e.what());
    } catch (...) {
      throw TrialFailure(seeds[k], "unknown error");
    }
  }
  out.aggregate = aggregate(out.values);
  return out;
}

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::kT: return "T";
    case Axis::kN: return "n";
    case Axis::kD: return "d";
  }
  return "?";
}

Axis axis_from_string(std::string_view name) {
  if (name == "T") return Axis::kT;
  if (name == "n") return Axis::kN;
  if (name == "d") return Axis::kD;
  throw ContractViolation("unknown sweep axis '" + std::string(name) + "' (expected T, n or d)");
}

void validate_sweep(const SweepResult& sweep) {
  for (std::size_t k = 0; k < sweep.points.size(); ++k) {
    const SweepPoint& p = sweep.points[k];
    if (p.trials < kMinSweepTrials) {
      std::ostringstream os;
      os << "sweep point " << k << " has " << p.trials << " trials; at least "
         << kMinSweepTrials << " are required";
      throw ContractViolation(os.str());
    }
    if (k > 0 && !(p.value > sweep.points[k - 1].value)) {
      throw ContractViolation("sweep axis values must be strictly increasing");
    }
  }
}

FitResult fit_power_law(std::span<const double> x, std::span<const double> y) {
  SIGNMOM_REQUIRE(x.size() == y.size(), "fit: x and y differ in length");
  SIGNMOM_REQUIRE(x.size() >= 4, "fit needs at least 4 points");
  const std::size_t m = x.size();
  std::vector<double> lx(m), ly(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (!(x[k] > 0) || !std::isfinite(x[k])) {
      throw RangeViolation("fit: axis values must be positive");
    }
    if (!(y[k] > 0) || !std::isfinite(y[k])) {
      std::ostringstream os;
      os << "fit: nonpositive mean " << y[k] << " at point " << k
         << " (metric plateaued at 0 or degenerate sweep)";
      throw RangeViolation(os.str());
    }
    lx[k] = std::log(x[k]);
    ly[k] = std::log(y[k]);
  }
  // Offsetting by the first point keeps a constant series exactly flat.
  const double x0 = lx[0], y0 = ly[0];
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    lx[k] -= x0;
    ly[k] -= y0;
    mx += lx[k];
    my += ly[k];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double dx = lx[k] - mx, dy = ly[k] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  SIGNMOM_REQUIRE(sxx > 0, "fit: axis values are all equal");
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = (my - fit.slope * mx) + y0 - fit.slope * x0;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double r = ly[k] - (my + fit.slope * (lx[k] - mx));
    ss_res += r * r;
  }
  fit.r_squared = syy > 0 ? 1.0 - ss_res / syy : (ss_res == 0 ? 1.0 : 0.0);
  return fit;
}

FitResult fit_rate(const SweepResult& sweep) {
  std::vector<double> x, y;
  for (const SweepPoint& p : sweep.points) {
    x.push_back(p.value);
    y.push_back(p.mean);
  }
  return fit_power_law(x, y);
}

Band band_around(double target, double half_width, double min_r_squared) {
  SIGNMOM_REQUIRE(half_width >= 0, "band half width must be nonnegative");
  return {target - half_width, target + half_width, min_r_squared};
}

bool within(const FitResult& fit, const Band& band) {
  return fit.slope >= band.lo && fit.slope <= band.hi && fit.r_squared >= band.min_r_squared;
}

}  // namespace signmom
