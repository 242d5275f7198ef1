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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "signmom/analysis.hpp"
#include "signmom/distsim.hpp"
#include "signmom/optimizers.hpp"
#include "signmom/problems.hpp"

namespace signmom {

using Json = nlohmann::json;

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// A problem fixture document:
///
///   {kind, d, parameters, f_star?, L?, L_inf?, L_sep?,
///    noise?{kind, sigma?, sigma_per_coord?, G?}, n?, heterogeneity?, seed}
///
/// parameters by kind (every kind accepts box and node_shifts):
///   separable-quadratic  coefficients (array or scalar broadcast)
///   shifted-quadratic    coefficients, shift (array or scalar)
///   logistic-synthetic   samples, reg, data_seed
///   rosenbrock           none
///
/// Declared f_star / L / L_inf / L_sep replace the computed constants, so
/// validation checks what the fixture claims. Unknown fields are rejected.
struct Fixture {
  Json source;  // the document as parsed
  ObjectiveSpec objective;
  NoiseModel noise;
  std::optional<std::size_t> n;
  double heterogeneity = 0.0;
  std::optional<std::vector<Vector>> node_shifts;
  std::uint64_t seed = 0;

  // Computed before declared values were applied.
  double computed_L = 0.0;
  double computed_L_inf = 0.0;
  double computed_f_star = 0.0;
  bool sigma_declared = false;
};

Fixture parse_fixture(const Json& doc);
Fixture load_fixture(const std::filesystem::path& path);
Json read_json_file(const std::filesystem::path& path);

/// FNV-1a of the canonical (sorted-key, compact) dump of the source.
std::uint64_t fixture_hash(const Fixture& fixture);

/// Node count override replaces the fixture's n. Uses node_shifts when given,
/// else heterogeneity and seed.
DistributedProblem build_distributed(const Fixture& fixture,
                                     std::optional<std::size_t> n = std::nullopt);

/// CSV with header t,f,g_l1,g_l2,v_err_sq; one row per step.
std::string run_record_csv(const RunRecord& record);

/// Sidecar with hyperparameters, tau, seed and fixture hash. Wallclock is left
/// out so files stay reproducible. `extra` is merged in at top level.
Json run_record_sidecar(const RunRecord& record, std::uint64_t fixture_hash,
                        const Json& extra = Json::object());

/// CSV with header axis,mean,std,trials.
std::string sweep_csv(const SweepResult& sweep);
Json sweep_json(const SweepResult& sweep, const std::optional<FitResult>& fit,
                const Json& extra = Json::object());
/// Reads the CSV written by sweep_csv.
SweepResult parse_sweep_csv(const std::string& text, Axis axis = Axis::kT,
                            Metric metric = Metric::kGradL1AtTau);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace signmom
