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
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "signmom/optimizers.hpp"

namespace signmom {

enum class Metric { kGradL1AtTau, kGradL2AtTau, kMinGradL1, kPlateauLevel };

std::string_view to_string(Metric metric);
Metric metric_from_string(std::string_view name);

inline constexpr double kDefaultPlateauWindow = 0.25;

/// Mean of the last floor(window * T) entries. window must lie in (0, 0.5]
/// and cover at least one entry.
double plateau_level(std::span<const double> series, double window);

/// Scalar summary of a run. The tau metrics read the gradient norm recorded
/// at x_tau; plateau_level averages the final window of the l1 series.
double extract_metric(const RunRecord& record, Metric metric,
                      double window = kDefaultPlateauWindow);

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation
  std::size_t trials = 0;
};

/// Mean and sample std of at least two values. The values are summed in
/// sorted order so the result does not depend on their arrangement.
Aggregate aggregate(std::span<const double> values);

/// Raised when one seed of run_trials fails. Carries the seed.
class TrialFailure : public std::runtime_error {
 public:
  TrialFailure(std::uint64_t seed, const std::string& what);
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

struct TrialOptions {
  Metric metric = Metric::kGradL1AtTau;
  double window = kDefaultPlateauWindow;
  std::size_t threads = 0;  // 0: hardware concurrency
  bool keep_records = false;
};

struct TrialResults {
  std::vector<std::uint64_t> seeds;
  std::vector<double> values;     // seed order
  std::vector<RunRecord> records;  // seed order, when kept
  Aggregate aggregate;
};

using TrialFn = std::function<RunRecord(std::uint64_t seed)>;

/// Runs `run` once per seed on a worker pool and aggregates after all
/// workers join. Needs at least two seeds. If any seed fails, throws
/// TrialFailure for the first failing seed in list order.
TrialResults run_trials(const TrialFn& run, std::span<const std::uint64_t> seeds,
                        const TrialOptions& options = {});

enum class Axis { kT, kN, kD };

std::string_view to_string(Axis axis);
Axis axis_from_string(std::string_view name);

struct SweepPoint {
  double value = 0.0;
  double mean = 0.0;
  double std = 0.0;
  std::size_t trials = 0;
};

struct SweepResult {
  Axis axis = Axis::kT;
  Metric metric = Metric::kGradL1AtTau;
  std::vector<SweepPoint> points;
};

inline constexpr std::size_t kMinSweepTrials = 10;

/// Throws ContractViolation unless every point has at least kMinSweepTrials
/// trials and the axis values are strictly increasing.
void validate_sweep(const SweepResult& sweep);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least squares line through (log x, log y). Needs at least 4 points and
/// positive values.
FitResult fit_power_law(std::span<const double> x, std::span<const double> y);

/// fit_power_law over (axis value, mean).
FitResult fit_rate(const SweepResult& sweep);

struct Band {
  double lo = 0.0;
  double hi = 0.0;
  double min_r_squared = 0.95;
};

inline constexpr double kDefaultBandHalfWidth = 0.10;

/// [target - half_width, target + half_width].
Band band_around(double target, double half_width = kDefaultBandHalfWidth,
                 double min_r_squared = 0.95);
bool within(const FitResult& fit, const Band& band);

}  // namespace signmom
