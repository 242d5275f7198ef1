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

#include "signmom/cli.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "signmom/error.hpp"

namespace signmom {
namespace {

namespace fs = std::filesystem;

void reject_unknown(const Json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw SchemaError(where + ": unknown field '" + key + "'");
  }
}

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw SchemaError(what + " must be a number");
  return j.get<double>();
}

std::size_t count(const Json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    throw SchemaError(what + " must be a nonnegative integer");
  }
  return j.get<std::size_t>();
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (item.empty()) throw ContractViolation("empty entry in list '" + text + "'");
    out.push_back(item);
  }
  if (out.empty()) throw ContractViolation("empty list");
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const std::string& s : split_list(text)) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || s[0] == '-') throw ContractViolation("bad seed '" + s + "'");
    seeds.push_back(v);
  }
  return seeds;
}

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> values;
  for (const std::string& s : split_list(text)) {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size()) throw ContractViolation("bad axis value '" + s + "'");
    values.push_back(v);
  }
  return values;
}

std::vector<std::uint64_t> range_seeds(std::size_t trials) {
  std::vector<std::uint64_t> seeds(trials);
  for (std::size_t k = 0; k < trials; ++k) seeds[k] = k + 1;
  return seeds;
}

std::vector<std::uint64_t> sweep_seeds(const ExperimentConfig& config) {
  return config.seeds ? *config.seeds : range_seeds(config.trials);
}

std::size_t axis_integer(double value, Axis axis) {
  if (!(value >= 1) || value != std::floor(value) || value > 1e15) {
    throw ContractViolation("axis " + std::string(to_string(axis)) +
                            " needs positive integer values, got " + format_double(value));
  }
  return static_cast<std::size_t>(value);
}

Vector materialize_x1(const X1Spec& spec, std::size_t d) {
  switch (spec.kind) {
    case X1Spec::Kind::kScalar: return Vector(d, spec.value);
    case X1Spec::Kind::kL2: return Vector(d, spec.value / std::sqrt(static_cast<double>(d)));
    case X1Spec::Kind::kVector:
      if (spec.vector.size() != d) {
        throw ContractViolation("x1 has " + std::to_string(spec.vector.size()) +
                                " entries, expected d = " + std::to_string(d));
      }
      return spec.vector;
  }
  return {};
}

Json x1_to_json(const X1Spec& spec) {
  switch (spec.kind) {
    case X1Spec::Kind::kScalar: return spec.value;
    case X1Spec::Kind::kL2: return Json{{"l2", spec.value}};
    case X1Spec::Kind::kVector: return spec.vector;
  }
  return nullptr;
}

std::string hash_hex(std::uint64_t h) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kSmm: return "smm";
    case Algorithm::kSignSgd: return "signsgd";
    case Algorithm::kSgdm: return "sgdm";
    case Algorithm::kMvsmV1: return "mvsm-v1";
    case Algorithm::kMvsmV2: return "mvsm-v2";
    case Algorithm::kDoubleSign: return "double-sign";
  }
  return "?";
}

Algorithm algorithm_from_string(std::string_view name) {
  for (Algorithm a : {Algorithm::kSmm, Algorithm::kSignSgd, Algorithm::kSgdm,
                      Algorithm::kMvsmV1, Algorithm::kMvsmV2, Algorithm::kDoubleSign}) {
    if (name == to_string(a)) return a;
  }
  throw SchemaError("unknown algorithm '" + std::string(name) + "'");
}

bool is_distributed(Algorithm algorithm) {
  return algorithm == Algorithm::kMvsmV1 || algorithm == Algorithm::kMvsmV2 ||
         algorithm == Algorithm::kDoubleSign;
}

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kExplicit: return "explicit";
    case ScheduleKind::kTheorem1: return "theorem1";
    case ScheduleKind::kTheorem2: return "theorem2";
    case ScheduleKind::kTheorem3: return "theorem3";
    case ScheduleKind::kTheorem3Plus: return "theorem3plus";
    case ScheduleKind::kTheorem4: return "theorem4";
  }
  return "?";
}

ExperimentConfig parse_config(const Json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw SchemaError("config must be a JSON object");
  reject_unknown(doc,
                 {"problem", "algorithm", "schedule", "T", "n", "G", "seeds", "trials", "x1",
                  "metric", "window", "band", "target", "min_r_squared", "axis", "values",
                  "stub", "record_transcript", "check_replicas"},
                 "config");
  ExperimentConfig c;
  if (!doc.contains("algorithm") || !doc["algorithm"].is_string()) {
    throw SchemaError("config: algorithm is required");
  }
  c.algorithm = algorithm_from_string(doc["algorithm"].get<std::string>());

  if (doc.contains("problem")) {
    const Json& p = doc["problem"];
    if (p.is_string()) {
      fs::path path = p.get<std::string>();
      if (path.is_relative()) path = base_dir / path;
      c.problem = read_json_file(path);
    } else if (p.is_object()) {
      c.problem = p;
    } else {
      throw SchemaError("config: problem must be a fixture object or a path");
    }
  }

  if (doc.contains("schedule")) {
    const Json& s = doc["schedule"];
    if (!s.is_object()) throw SchemaError("schedule must be an object");
    reject_unknown(s, {"kind", "c", "eta", "beta"}, "schedule");
    if (!s.contains("kind") || !s["kind"].is_string()) {
      throw SchemaError("schedule.kind is required");
    }
    const std::string kind = s["kind"].get<std::string>();
    bool found = false;
    for (ScheduleKind k : {ScheduleKind::kExplicit, ScheduleKind::kTheorem1,
                           ScheduleKind::kTheorem2, ScheduleKind::kTheorem3,
                           ScheduleKind::kTheorem3Plus, ScheduleKind::kTheorem4}) {
      if (kind == to_string(k)) {
        c.schedule.kind = k;
        found = true;
      }
    }
    if (!found) throw SchemaError("unknown schedule kind '" + kind + "'");
    if (s.contains("c")) c.schedule.c = number(s["c"], "schedule.c");
    if (c.schedule.kind == ScheduleKind::kExplicit) {
      if (!s.contains("eta") || !s.contains("beta")) {
        throw SchemaError("explicit schedule needs eta and beta");
      }
      c.schedule.eta = number(s["eta"], "schedule.eta");
      c.schedule.beta = number(s["beta"], "schedule.beta");
    } else if (s.contains("eta") || s.contains("beta")) {
      throw SchemaError("eta and beta are only allowed with the explicit schedule");
    }
  } else if (is_distributed(c.algorithm)) {
    c.schedule.kind = c.algorithm == Algorithm::kMvsmV2 ? ScheduleKind::kTheorem4
                                                         : ScheduleKind::kTheorem3;
  }

  if (doc.contains("T")) c.T = count(doc["T"], "T");
  if (doc.contains("n")) c.n = count(doc["n"], "n");
  if (doc.contains("G")) c.G = number(doc["G"], "G");
  if (doc.contains("seeds")) {
    const Json& s = doc["seeds"];
    if (!s.is_array() || s.empty()) throw SchemaError("seeds must be a nonempty array");
    std::vector<std::uint64_t> seeds;
    for (const Json& v : s) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw SchemaError("seeds must be nonnegative integers");
      }
      seeds.push_back(v.get<std::uint64_t>());
    }
    c.seeds = std::move(seeds);
  }
  if (doc.contains("trials")) c.trials = count(doc["trials"], "trials");
  if (doc.contains("x1")) {
    const Json& x = doc["x1"];
    if (x.is_number()) {
      c.x1 = {X1Spec::Kind::kScalar, x.get<double>(), {}};
    } else if (x.is_array()) {
      c.x1.kind = X1Spec::Kind::kVector;
      for (const Json& v : x) c.x1.vector.push_back(number(v, "x1 entry"));
    } else if (x.is_object()) {
      reject_unknown(x, {"l2"}, "x1");
      if (!x.contains("l2")) throw SchemaError("x1 object needs l2");
      c.x1 = {X1Spec::Kind::kL2, number(x["l2"], "x1.l2"), {}};
    } else {
      throw SchemaError("x1 must be a number, an array or {\"l2\": r}");
    }
  }
  if (doc.contains("metric")) {
    if (!doc["metric"].is_string()) throw SchemaError("metric must be a string");
    c.metric = metric_from_string(doc["metric"].get<std::string>());
  }
  if (doc.contains("window")) c.window = number(doc["window"], "window");
  if (doc.contains("band")) c.band = number(doc["band"], "band");
  if (doc.contains("target")) c.target = number(doc["target"], "target");
  if (doc.contains("min_r_squared")) c.min_r_squared = number(doc["min_r_squared"], "min_r_squared");
  if (doc.contains("axis")) {
    if (!doc["axis"].is_string()) throw SchemaError("axis must be a string");
    c.axis = axis_from_string(doc["axis"].get<std::string>());
  }
  if (doc.contains("values")) {
    if (!doc["values"].is_array()) throw SchemaError("values must be an array");
    for (const Json& v : doc["values"]) c.values.push_back(number(v, "values entry"));
  }
  if (doc.contains("stub")) {
    const Json& s = doc["stub"];
    if (!s.is_object()) throw SchemaError("stub must be an object");
    reject_unknown(s, {"amplitude", "exponent"}, "stub");
    PowerLawStub stub;
    if (s.contains("amplitude")) stub.amplitude = number(s["amplitude"], "stub.amplitude");
    if (s.contains("exponent")) stub.exponent = number(s["exponent"], "stub.exponent");
    c.stub = stub;
  }
  for (const char* key : {"record_transcript", "check_replicas"}) {
    if (doc.contains(key)) {
      if (!doc[key].is_boolean()) throw SchemaError(std::string(key) + " must be a boolean");
      (std::string(key) == "record_transcript" ? c.record_transcript : c.check_replicas) =
          doc[key].get<bool>();
    }
  }
  if (!c.problem && !c.stub) throw SchemaError("config: problem is required");
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  return parse_config(read_json_file(path), path.parent_path());
}

Json config_to_json(const ExperimentConfig& c) {
  Json j = Json::object();
  if (c.problem) j["problem"] = *c.problem;
  j["algorithm"] = std::string(to_string(c.algorithm));
  Json s = {{"kind", std::string(to_string(c.schedule.kind))}, {"c", c.schedule.c}};
  if (c.schedule.kind == ScheduleKind::kExplicit) {
    s["eta"] = c.schedule.eta;
    s["beta"] = c.schedule.beta;
  }
  j["schedule"] = s;
  j["T"] = c.T;
  if (c.n) j["n"] = *c.n;
  if (c.G) j["G"] = *c.G;
  j["seeds"] = sweep_seeds(c);
  j["trials"] = c.seeds ? c.seeds->size() : c.trials;
  j["x1"] = x1_to_json(c.x1);
  j["metric"] = std::string(to_string(c.metric));
  j["window"] = c.window;
  j["band"] = c.band;
  if (c.target) j["target"] = *c.target;
  j["min_r_squared"] = c.min_r_squared;
  if (c.axis) j["axis"] = std::string(to_string(*c.axis));
  if (!c.values.empty()) j["values"] = c.values;
  if (c.stub) j["stub"] = {{"amplitude", c.stub->amplitude}, {"exponent", c.stub->exponent}};
  j["record_transcript"] = c.record_transcript;
  j["check_replicas"] = c.check_replicas;
  return j;
}

void check_compatibility(const ExperimentConfig& c) {
  const bool dist = is_distributed(c.algorithm);
  const ScheduleKind k = c.schedule.kind;
  if (k == ScheduleKind::kTheorem4 && c.algorithm != Algorithm::kMvsmV2) {
    throw ContractViolation("schedule theorem4 is only valid with mvsm-v2");
  }
  if ((k == ScheduleKind::kTheorem3 || k == ScheduleKind::kTheorem3Plus) && !dist) {
    throw ContractViolation("schedule " + std::string(to_string(k)) +
                            " needs a distributed algorithm");
  }
  if ((k == ScheduleKind::kTheorem1 || k == ScheduleKind::kTheorem2) && dist) {
    throw ContractViolation("schedule " + std::string(to_string(k)) +
                            " is for single-node algorithms");
  }
  if (!dist && c.n && *c.n > 1) {
    throw ContractViolation("single-node algorithm " + std::string(to_string(c.algorithm)) +
                            " rejects n > 1");
  }
  if (dist && c.n && *c.n < 1) throw ContractViolation("distributed algorithms need n >= 1");
  if (c.G && !dist) throw ContractViolation("G is only used by distributed algorithms");
  if (c.axis == Axis::kN && !dist) {
    throw ContractViolation("an n sweep needs a distributed algorithm");
  }
}

Experiment prepare(const ExperimentConfig& config, const Overrides& ov) {
  check_compatibility(config);
  if (!config.problem) throw ContractViolation("experiment has no problem fixture");
  Experiment e;
  e.config = config;
  Json doc = *config.problem;
  if (ov.d) doc["d"] = *ov.d;
  e.fixture = parse_fixture(doc);
  e.fixture_hash = fixture_hash(e.fixture);
  e.T = ov.T.value_or(config.T);
  SIGNMOM_REQUIRE(e.T >= 1, "T must be >= 1");
  const std::size_t d = e.fixture.objective.d;
  e.x1 = materialize_x1(config.x1, d);

  const bool dist = is_distributed(config.algorithm);
  std::optional<std::size_t> n = ov.n ? ov.n : config.n;
  if (dist) {
    if (!n && !e.fixture.n) {
      throw ContractViolation("distributed algorithm needs n in the config or the fixture");
    }
    e.dist = build_distributed(e.fixture, n);
    if (config.algorithm != Algorithm::kDoubleSign) {
      if (config.G) {
        e.G = *config.G;
      } else if (e.fixture.noise.G) {
        e.G = *e.fixture.noise.G;
      } else {
        e.G = certified_gradient_bound(*e.dist);
      }
    }
  } else if (e.fixture.n.value_or(1) > 1 && !(n && *n == 1)) {
    throw ContractViolation("single-node algorithm " + std::string(to_string(config.algorithm)) +
                            " rejects a fixture with n > 1");
  }

  const ScheduleSpec& s = config.schedule;
  switch (s.kind) {
    case ScheduleKind::kExplicit: e.schedule = {s.eta, s.beta}; break;
    case ScheduleKind::kTheorem1: e.schedule = theorem1_params(e.T, d, s.c); break;
    case ScheduleKind::kTheorem2: {
      const double delta_f = eval_f(e.fixture.objective, e.x1) - e.fixture.objective.f_star;
      e.schedule = theorem2_params(e.T, delta_f, e.fixture.objective.L_inf, s.c);
      break;
    }
    case ScheduleKind::kTheorem3: e.schedule = theorem3_params(e.T, d, s.c); break;
    case ScheduleKind::kTheorem3Plus: e.schedule = theorem3plus_params(e.dist->n, s.c); break;
    case ScheduleKind::kTheorem4: e.schedule = theorem4_params(e.T, d, s.c); break;
  }
  SIGNMOM_REQUIRE(std::isfinite(e.schedule.eta) && e.schedule.eta > 0, "eta must be positive");
  SIGNMOM_REQUIRE(e.schedule.beta > 0 && e.schedule.beta <= 1, "beta must lie in (0, 1]");
  return e;
}

ExperimentRun run_experiment(const Experiment& e, std::uint64_t seed,
                             std::ostream* transcript_sink) {
  const ExperimentConfig& c = e.config;
  ExperimentRun out;
  const double eta = e.schedule.eta, beta = e.schedule.beta;
  if (!is_distributed(c.algorithm)) {
    SingleAlgorithm alg = c.algorithm == Algorithm::kSmm       ? SingleAlgorithm::kSmm
                          : c.algorithm == Algorithm::kSignSgd ? SingleAlgorithm::kSignSgd
                                                               : SingleAlgorithm::kSgdm;
    out.record =
        run_single(alg, e.fixture.objective, e.fixture.noise, e.x1, e.T, eta, beta, seed);
    return out;
  }
  DistOptions opt;
  opt.check_replicas = c.check_replicas;
  opt.transcript_sink = transcript_sink;
  DistRunResult res =
      c.algorithm == Algorithm::kDoubleSign
          ? run_double_sign_baseline(*e.dist, e.x1, e.T, eta, beta, seed, opt)
          : run_mvsm(*e.dist, c.algorithm == Algorithm::kMvsmV1 ? MvsmVariant::kV1
                                                                : MvsmVariant::kV2,
                     e.x1, e.T, eta, beta, e.G, seed, opt);
  out.record = std::move(res.record);
  res.record = RunRecord{};
  out.dist = std::move(res);
  return out;
}

ValidationReport validate_fixture(const Fixture& fx, const std::optional<Vector>& x1,
                                  std::optional<double> G, bool distributed) {
  ValidationReport r;
  const ObjectiveSpec& obj = fx.objective;
  const std::size_t d = obj.d;
  std::ostringstream os;

  RandomStream rng = RandomStream::derive(fx.seed, kRunKey, 1);
  const SmoothnessReport sm = certify_smoothness(obj, 10000, rng);
  if (sm.l2_violations > 0) {
    os.str("");
    os << "A2 (l2-smooth): empirical ratio " << format_double(sm.l2_ratio)
       << " exceeds declared L = " << format_double(obj.L) << " on " << sm.l2_violations
       << " of " << sm.trials << " pairs";
    r.errors.push_back(os.str());
  }
  if (sm.linf_violations > 0) {
    os.str("");
    os << "A3 (l-inf-smooth): empirical ratio " << format_double(sm.linf_ratio)
       << " exceeds declared L_inf = " << format_double(obj.L_inf) << " on "
       << sm.linf_violations << " of " << sm.trials << " pairs";
    r.errors.push_back(os.str());
  }
  if (obj.L_sep) {
    if (obj.kind == ObjectiveKind::kSeparableQuadratic ||
        obj.kind == ObjectiveKind::kShiftedQuadratic) {
      for (std::size_t i = 0; i < d; ++i) {
        if ((*obj.L_sep)[i] < obj.coefficients[i]) {
          os.str("");
          os << "A1 (separable smoothness): L_sep[" << i << "] = "
             << format_double((*obj.L_sep)[i]) << " is below the curvature "
             << format_double(obj.coefficients[i]);
          r.errors.push_back(os.str());
        }
      }
    } else {
      r.warnings.push_back("L_sep is not certified for kind " + std::string(to_string(obj.kind)));
    }
  }

  // f_star must lower-bound f on the box.
  RandomStream probe = RandomStream::derive(fx.seed, kRunKey, 2);
  Vector x(d);
  double lowest = eval_f(obj, minimizer(obj));
  for (int k = 0; k < 1000; ++k) {
    for (std::size_t i = 0; i < d; ++i) {
      const double c = obj.shift.empty() ? 0.0 : obj.shift[i];
      x[i] = c + obj.box * (2.0 * probe.uniform() - 1.0);
    }
    lowest = std::min(lowest, eval_f(obj, x));
  }
  if (lowest < obj.f_star - 1e-9 * std::max(1.0, std::abs(obj.f_star))) {
    os.str("");
    os << "f_star = " << format_double(obj.f_star) << " is above f = " << format_double(lowest)
       << " at a probe point";
    r.errors.push_back(os.str());
  }

  // Noise moments, by Monte Carlo.
  const NoiseModel& noise = fx.noise;
  if (noise.kind == NoiseKind::kNone) {
    if (fx.sigma_declared) r.warnings.push_back("declared σ unused (noise kind none)");
  } else {
    constexpr std::size_t kSamples = 100000;
    RandomStream nrng = RandomStream::derive(fx.seed, kRunKey, 3);
    Vector e(d), m1(d, 0.0), m2(d, 0.0), m4(d, 0.0);
    for (std::size_t k = 0; k < kSamples; ++k) {
      sample_noise_into(noise, nrng, e);
      for (std::size_t i = 0; i < d; ++i) {
        m1[i] += e[i];
        m2[i] += e[i] * e[i];
        m4[i] += e[i] * e[i] * e[i] * e[i];
      }
    }
    const double N = static_cast<double>(kSamples);
    double total = 0.0, total_bound = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double s2 = noise.sigma_per_coord[i] * noise.sigma_per_coord[i];
      const double mean2 = m2[i] / N;
      const double se = std::sqrt(std::max(0.0, m4[i] / N - mean2 * mean2) / N);
      total += mean2;
      total_bound += s2;
      if (mean2 > s2 + 4.0 * se + 1e-15) {
        os.str("");
        os << "A5 (separable noise): coordinate " << i << " second moment "
           << format_double(mean2) << " exceeds sigma_i^2 = " << format_double(s2);
        r.errors.push_back(os.str());
      }
    }
    const double sigma2 = noise.sigma * noise.sigma;
    if (total > std::max(sigma2, total_bound) * 1.02 + 1e-15) {
      os.str("");
      os << "A4 (bounded noise): E||e||^2 = " << format_double(total) << " exceeds sigma^2 = "
         << format_double(sigma2);
      r.errors.push_back(os.str());
    }
  }

  // Bounded gradients.
  const double certified = certified_gradient_bound(obj, noise);
  if (G) {
    if (x1) {
      const double at_x1 = norm_inf(eval_grad(obj, *x1));
      if (*G < at_x1) {
        os.str("");
        os << "A9 (bounded gradients): G = " << format_double(*G) << " is below ||grad f(x1)||_inf = "
           << format_double(at_x1);
        r.errors.push_back(os.str());
      }
    }
    if (*G < certified) {
      os.str("");
      os << "A9 (bounded gradients): G = " << format_double(*G)
         << " is below the certified bound " << format_double(certified) << " on the box";
      r.errors.push_back(os.str());
    }
  }

  r.constants = {{"kind", std::string(to_string(obj.kind))},
                 {"d", d},
                 {"L", obj.L},
                 {"L_inf", obj.L_inf},
                 {"f_star", obj.f_star},
                 {"computed_L", fx.computed_L},
                 {"computed_L_inf", fx.computed_L_inf},
                 {"computed_f_star", fx.computed_f_star},
                 {"empirical_l2_ratio", sm.l2_ratio},
                 {"empirical_linf_ratio", sm.linf_ratio},
                 {"box", obj.box},
                 {"noise", std::string(to_string(noise.kind))},
                 {"sigma", noise.sigma},
                 {"certified_G", certified}};
  if (G) r.constants["G"] = *G;
  if (distributed) {
    r.constants["node_smoothness"] = "each node is a shifted copy with the common L (A7)";
    r.constants["node_noise"] = "each node uses the fixture noise model (A8)";
  }
  return r;
}

namespace {

ValidationReport validate_point(const ExperimentConfig& config, const Overrides& ov) {
  const Experiment e = prepare(config, ov);
  const bool dist = is_distributed(config.algorithm);
  std::optional<double> G = e.fixture.noise.G;
  if (dist && config.algorithm != Algorithm::kDoubleSign) G = e.G;
  ValidationReport r = validate_fixture(e.fixture, e.x1, G, dist);
  if (e.dist) {
    const double dist_bound = certified_gradient_bound(*e.dist);
    if (G && *G < dist_bound) {
      r.errors.push_back("A9 (bounded gradients): G = " + format_double(*G) +
                         " is below the certified node bound " + format_double(dist_bound));
    }
    for (const ObjectiveSpec& node : e.dist->nodes) {
      if (G && norm_inf(eval_grad(node, e.x1)) > *G) {
        r.errors.push_back("A9 (bounded gradients): a node gradient at x1 exceeds G");
        break;
      }
    }
    r.constants["n"] = e.dist->n;
    r.constants["global_L"] = e.dist->L;
    r.constants["global_L_inf"] = e.dist->L_inf;
    r.constants["global_f_star"] = e.dist->f_star;
  }
  r.constants["eta"] = e.schedule.eta;
  r.constants["beta"] = e.schedule.beta;
  r.constants["T"] = e.T;
  return r;
}

}  // namespace

ValidationReport validate_document(const Json& doc, const fs::path& base_dir) {
  ValidationReport r;
  try {
    if (doc.is_object() && doc.contains("kind")) {
      const Fixture fx = parse_fixture(doc);
      return validate_fixture(fx, std::nullopt, fx.noise.G, fx.n.value_or(1) > 1);
    }
    const ExperimentConfig config = parse_config(doc, base_dir);
    if (!config.problem) {
      r.constants = {{"stub", true}};
      return r;
    }
    // A sweep is validated at every axis value; messages name the point.
    std::vector<std::pair<std::string, Overrides>> points;
    if (config.axis && !config.values.empty()) {
      for (double value : config.values) {
        Overrides ov;
        const std::size_t iv = axis_integer(value, *config.axis);
        if (*config.axis == Axis::kT) ov.T = iv;
        if (*config.axis == Axis::kN) ov.n = iv;
        if (*config.axis == Axis::kD) ov.d = iv;
        points.emplace_back(std::string(to_string(*config.axis)) + "=" + std::to_string(iv) + ": ",
                            ov);
      }
    } else {
      points.emplace_back("", Overrides{});
    }
    for (const auto& [prefix, ov] : points) {
      ValidationReport one;
      try {
        one = validate_point(config, ov);
      } catch (const std::exception& ex) {
        r.errors.push_back(prefix + "schema: " + ex.what());
        continue;
      }
      for (const auto& m : one.errors) r.errors.push_back(prefix + m);
      for (const auto& m : one.warnings) r.warnings.push_back(prefix + m);
      if (r.constants.empty() || r.constants.is_null()) r.constants = one.constants;
    }
  } catch (const std::exception& ex) {
    r.errors.push_back(std::string("schema: ") + ex.what());
  }
  return r;
}

SweepOutcome run_sweep(const ExperimentConfig& config) {
  SIGNMOM_REQUIRE(config.axis.has_value(), "sweep needs an axis");
  SIGNMOM_REQUIRE(config.values.size() >= 4, "sweep needs at least 4 axis values");
  for (std::size_t k = 1; k < config.values.size(); ++k) {
    SIGNMOM_REQUIRE(config.values[k] > config.values[k - 1],
                    "sweep axis values must be strictly increasing");
  }
  const Axis axis = *config.axis;
  const std::vector<std::uint64_t> seeds = sweep_seeds(config);
  SIGNMOM_REQUIRE(seeds.size() >= kMinSweepTrials, "sweep needs at least 10 trials per point");

  SweepOutcome out;
  out.sweep.axis = axis;
  out.sweep.metric = config.metric;
  for (double value : config.values) {
    SweepPoint p;
    p.value = value;
    p.trials = seeds.size();
    if (config.stub) {
      SIGNMOM_REQUIRE(value > 0, "stub sweep needs positive axis values");
      p.mean = config.stub->amplitude * std::pow(value, config.stub->exponent);
      p.std = 0.0;
    } else {
      Overrides ov;
      const std::size_t iv = axis_integer(value, axis);
      if (axis == Axis::kT) ov.T = iv;
      if (axis == Axis::kN) ov.n = iv;
      if (axis == Axis::kD) ov.d = iv;
      const Experiment e = prepare(config, ov);
      TrialOptions opt;
      opt.metric = config.metric;
      opt.window = config.window;
      const TrialResults tr = run_trials(
          [&](std::uint64_t seed) { return run_experiment(e, seed).record; }, seeds, opt);
      p.mean = tr.aggregate.mean;
      p.std = tr.aggregate.std;
    }
    out.sweep.points.push_back(p);
  }
  validate_sweep(out.sweep);
  out.fit = fit_rate(out.sweep);
  if (config.target) {
    out.band = band_around(*config.target, config.band, config.min_r_squared);
    out.passed = within(out.fit, *out.band);
  }
  return out;
}

namespace {

void print_report(const ValidationReport& r, std::ostream& out) {
  for (const std::string& w : r.warnings) out << "warning: " << w << "\n";
  for (const std::string& e : r.errors) out << "error: " << e << "\n";
  if (r.ok()) out << "ok\n";
  out << r.constants.dump(2) << "\n";
}

void apply_cli_overrides(ExperimentConfig& c, const std::string& seeds, std::size_t trials,
                         const std::string& axis, const std::string& values,
                         const std::string& metric, std::optional<double> band) {
  if (!seeds.empty()) {
    c.seeds = parse_seed_list(seeds);
  } else if (trials > 0) {
    c.seeds.reset();
    c.trials = trials;
  }
  if (!axis.empty()) c.axis = axis_from_string(axis);
  if (!values.empty()) c.values = parse_value_list(values);
  if (!metric.empty()) c.metric = metric_from_string(metric);
  if (band) c.band = *band;
}

Json fit_json(const FitResult& fit, const std::optional<Band>& band, bool passed) {
  Json j = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}};
  if (band) {
    j["band"] = {{"lo", band->lo}, {"hi", band->hi}, {"min_r_squared", band->min_r_squared}};
    j["passed"] = passed;
  }
  return j;
}

void print_fit(const FitResult& fit, const std::optional<Band>& band, bool passed,
               std::ostream& out) {
  out << "slope " << format_double(fit.slope) << " intercept " << format_double(fit.intercept)
      << " r_squared " << format_double(fit.r_squared) << "\n";
  if (band) {
    out << "band [" << format_double(band->lo) << ", " << format_double(band->hi)
        << "], r_squared >= " << format_double(band->min_r_squared) << ": "
        << (passed ? "PASS" : "FAIL") << "\n";
  }
}

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"sign-based momentum methods: fixtures, runs and rate sweeps"};
  app.require_subcommand(1);
  std::string config_path, out_dir = "out", seeds, axis, values, metric, csv_path;
  std::size_t trials = 0;
  std::optional<double> band, target;

  auto* validate = app.add_subcommand("validate", "check a fixture or experiment config");
  validate->add_option("--config", config_path, "fixture or config JSON")->required();

  const auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config JSON")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seeds", seeds, "comma separated seed list");
    sub->add_option("--trials", trials, "use seeds 1..N");
  };
  auto* run = app.add_subcommand("run", "run one experiment per seed");
  add_run_flags(run);
  auto* sweep = app.add_subcommand("sweep", "sweep an axis and fit the log-log slope");
  add_run_flags(sweep);
  sweep->add_option("--axis", axis, "T, n or d");
  sweep->add_option("--values", values, "comma separated axis values");
  sweep->add_option("--metric", metric, "grad_l1_at_tau, grad_l2_at_tau, min_grad_l1, plateau_level");
  sweep->add_option("--band", band, "half width of the slope band");

  auto* fit = app.add_subcommand("fit-rate", "fit the slope of an existing sweep CSV");
  fit->add_option("--config", csv_path, "sweep CSV (axis,mean,std,trials)")->required();
  fit->add_option("--out", out_dir, "output directory");
  fit->add_option("--band", band, "half width of the slope band");
  fit->add_option("--target", target, "expected slope; enables the band check");
  fit->add_option("--axis", axis, "axis label for the JSON report");
  fit->add_option("--metric", metric, "metric label for the JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*validate) {
      const fs::path path = config_path;
      const ValidationReport r = validate_document(read_json_file(path), path.parent_path());
      print_report(r, out);
      return r.ok() ? 0 : 1;
    }

    if (*fit) {
      const SweepResult s =
          parse_sweep_csv(read_text_file(csv_path), axis.empty() ? Axis::kT : axis_from_string(axis),
                          metric.empty() ? Metric::kGradL1AtTau : metric_from_string(metric));
      const FitResult f = fit_rate(s);
      std::optional<Band> b;
      bool passed = true;
      if (target) {
        b = band_around(*target, band.value_or(kDefaultBandHalfWidth));
        passed = within(f, *b);
      }
      print_fit(f, b, passed, out);
      fs::create_directories(out_dir);
      write_text_file(fs::path(out_dir) / "fit.json", fit_json(f, b, passed).dump(2) + "\n");
      return passed ? 0 : 1;
    }

    ExperimentConfig config = load_config(config_path);
    apply_cli_overrides(config, seeds, trials, axis, values, metric, band);
    fs::create_directories(out_dir);

    if (*run) {
      const Experiment e = prepare(config);
      const std::vector<std::uint64_t> run_seeds =
          config.seeds ? *config.seeds
                       : (trials > 0 ? range_seeds(trials) : std::vector<std::uint64_t>{1});
      ExperimentConfig recorded = config;
      recorded.seeds = run_seeds;
      for (std::uint64_t seed : run_seeds) {
        const std::string stem = "run_seed" + std::to_string(seed);
        std::optional<std::ofstream> bin;
        if (config.record_transcript && e.dist) {
          bin.emplace(fs::path(out_dir) / ("transcript_seed" + std::to_string(seed) + ".bin"),
                      std::ios::binary);
        }
        const ExperimentRun res = run_experiment(e, seed, bin ? &*bin : nullptr);
        Json extra = {{"config", config_to_json(recorded)},
                      {"algorithm", std::string(to_string(config.algorithm))}};
        if (res.dist) {
          extra["uplink_bits"] = res.dist->uplink_bits;
          extra["downlink_bits"] = res.dist->downlink_bits;
          extra["n"] = e.dist->n;
          if (config.algorithm != Algorithm::kDoubleSign) extra["G"] = e.G;
        }
        write_text_file(fs::path(out_dir) / (stem + ".csv"), run_record_csv(res.record));
        write_text_file(fs::path(out_dir) / (stem + ".json"),
                        run_record_sidecar(res.record, e.fixture_hash, extra).dump(2) + "\n");
        out << "seed " << seed << ": T " << e.T << " tau " << res.record.tau
            << " grad_l1_at_tau " << format_double(res.record.g_l1[res.record.tau - 1]);
        if (res.dist) {
          out << " uplink_bits " << res.dist->uplink_bits << " downlink_bits "
              << res.dist->downlink_bits;
        }
        out << " fixture fnv1a64:" << hash_hex(e.fixture_hash) << "\n";
      }
      return 0;
    }

    if (*sweep) {
      const SweepOutcome o = run_sweep(config);
      write_text_file(fs::path(out_dir) / "sweep.csv", sweep_csv(o.sweep));
      Json extra = {{"config", config_to_json(config)},
                    {"fit_report", fit_json(o.fit, o.band, o.passed)}};
      write_text_file(fs::path(out_dir) / "sweep.json",
                      sweep_json(o.sweep, o.fit, extra).dump(2) + "\n");
      out << sweep_csv(o.sweep);
      print_fit(o.fit, o.band, o.passed, out);
      return o.passed ? 0 : 1;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace signmom
