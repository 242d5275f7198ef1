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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "signmom/analysis.hpp"
#include "signmom/distsim.hpp"
#include "signmom/io.hpp"

namespace signmom {

enum class Algorithm { kSmm, kSignSgd, kSgdm, kMvsmV1, kMvsmV2, kDoubleSign };

std::string_view to_string(Algorithm algorithm);
Algorithm algorithm_from_string(std::string_view name);
bool is_distributed(Algorithm algorithm);

enum class ScheduleKind { kExplicit, kTheorem1, kTheorem2, kTheorem3, kTheorem3Plus, kTheorem4 };

std::string_view to_string(ScheduleKind kind);

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::kTheorem1;
  double c = 1.0;
  double eta = 0.0;   // explicit only
  double beta = 0.0;  // explicit only
};

/// Starting point: a scalar fills every coordinate, an array is taken as is,
/// {"l2": r} is r / sqrt(d) in every coordinate.
struct X1Spec {
  enum class Kind { kScalar, kVector, kL2 } kind = Kind::kScalar;
  double value = 1.0;
  Vector vector;
};

/// Exact power law amplitude * value^exponent, standing in for real runs.
struct PowerLawStub {
  double amplitude = 1.0;
  double exponent = 0.0;
};

/// One JSON document. All keys are optional except algorithm and, unless a
/// stub is given, problem:
///
///   problem (fixture object or path), algorithm, schedule {kind, c, eta,
///   beta}, T, n, G, seeds, trials, x1, metric, window, band, target,
///   min_r_squared, axis, values, stub {amplitude, exponent},
///   record_transcript, check_replicas
struct ExperimentConfig {
  std::optional<Json> problem;  // fixture document, paths already resolved
  Algorithm algorithm = Algorithm::kSmm;
  ScheduleSpec schedule;
  std::size_t T = 1000;
  std::optional<std::size_t> n;
  std::optional<double> G;
  std::optional<std::vector<std::uint64_t>> seeds;
  std::size_t trials = 50;
  X1Spec x1;
  Metric metric = Metric::kGradL1AtTau;
  double window = kDefaultPlateauWindow;
  double band = kDefaultBandHalfWidth;
  std::optional<double> target;
  double min_r_squared = 0.95;
  std::optional<Axis> axis;
  std::vector<double> values;
  std::optional<PowerLawStub> stub;
  bool record_transcript = false;
  bool check_replicas = false;
};

/// Relative problem paths are resolved against `base_dir`.
ExperimentConfig parse_config(const Json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// The config with every default filled in.
Json config_to_json(const ExperimentConfig& config);

/// Rejects incompatible algorithm / schedule / n combinations.
void check_compatibility(const ExperimentConfig& config);

/// Axis overrides applied on top of a config.
struct Overrides {
  std::optional<std::size_t> T;
  std::optional<std::size_t> n;
  std::optional<std::size_t> d;
};

/// A config made concrete for one sweep point.
struct Experiment {
  ExperimentConfig config;
  Fixture fixture;
  std::optional<DistributedProblem> dist;
  std::size_t T = 0;
  Vector x1;
  StepSchedule schedule;
  double G = 0.0;  // distributed only
  std::uint64_t fixture_hash = 0;
};

Experiment prepare(const ExperimentConfig& config, const Overrides& overrides = {});

struct ExperimentRun {
  RunRecord record;
  std::optional<DistRunResult> dist;  // record moved out, ledger kept
};

ExperimentRun run_experiment(const Experiment& experiment, std::uint64_t seed,
                             std::ostream* transcript_sink = nullptr);

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  Json constants = Json::object();
  bool ok() const { return errors.empty(); }
};

/// Schema check, smoothness and noise certification, G feasibility. Each
/// error names the assumption it breaks.
ValidationReport validate_fixture(const Fixture& fixture, const std::optional<Vector>& x1,
                                  std::optional<double> G, bool distributed);

/// Accepts a fixture document or an experiment config document.
ValidationReport validate_document(const Json& doc, const std::filesystem::path& base_dir = {});

struct SweepOutcome {
  SweepResult sweep;
  FitResult fit;
  std::optional<Band> band;
  bool passed = true;
};

SweepOutcome run_sweep(const ExperimentConfig& config);

/// CLI entry point; returns the process exit code.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace signmom
