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

#include "signmom/io.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "signmom/error.hpp"

namespace signmom {
namespace {

void reject_unknown(const Json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw SchemaError(where + ": unknown field '" + key + "'");
    }
  }
}

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw SchemaError(what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(what + " must be finite");
  return v;
}

std::uint64_t unsigned_int(const Json& j, const std::string& what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw SchemaError(what + " must be a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

// Array of length d, or a scalar broadcast to d entries.
Vector vector_or_scalar(const Json& j, std::size_t d, const std::string& what) {
  if (j.is_number()) return Vector(d, number(j, what));
  if (!j.is_array()) throw SchemaError(what + " must be a number or an array");
  if (j.size() != d) {
    throw SchemaError(what + " has " + std::to_string(j.size()) + " entries, expected d = " +
                      std::to_string(d));
  }
  Vector out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number(j[i], what + "[" + std::to_string(i) + "]"));
  }
  return out;
}

NoiseModel parse_noise(const Json& j, std::size_t d, bool& sigma_declared) {
  if (!j.is_object()) throw SchemaError("noise must be an object");
  reject_unknown(j, {"kind", "sigma", "sigma_per_coord", "G"}, "noise");
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw SchemaError("noise.kind is required");
  }
  NoiseKind kind;
  try {
    kind = noise_kind_from_string(j["kind"].get<std::string>());
  } catch (const std::exception& e) {
    throw SchemaError(std::string("noise.kind: ") + e.what());
  }
  std::optional<double> G;
  if (j.contains("G")) {
    G = number(j["G"], "noise.G");
    if (!(*G > 0)) throw SchemaError("noise.G must be positive");
  }
  sigma_declared = j.contains("sigma") || j.contains("sigma_per_coord");
  if (j.contains("sigma") && j.contains("sigma_per_coord")) {
    throw SchemaError("noise: give sigma or sigma_per_coord, not both");
  }
  if (kind == NoiseKind::kNone) {
    NoiseModel noise = make_noise_none(d);
    noise.G = G;
    return noise;
  }
  if (j.contains("sigma_per_coord")) {
    Vector s = vector_or_scalar(j["sigma_per_coord"], d, "noise.sigma_per_coord");
    for (double v : s) {
      if (v < 0) throw SchemaError("noise.sigma_per_coord entries must be >= 0");
    }
    return make_noise_per_coord(kind, std::move(s), G);
  }
  if (!j.contains("sigma")) throw SchemaError("noise: sigma or sigma_per_coord is required");
  const double sigma = number(j["sigma"], "noise.sigma");
  if (sigma < 0) throw SchemaError("noise.sigma must be >= 0");
  return make_noise(kind, sigma, d, G);
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

Fixture parse_fixture(const Json& doc) {
  if (!doc.is_object()) throw SchemaError("fixture must be a JSON object");
  reject_unknown(doc,
                 {"kind", "d", "parameters", "f_star", "L", "L_inf", "L_sep", "noise", "n",
                  "heterogeneity", "seed"},
                 "fixture");
  for (const char* key : {"kind", "d", "parameters", "seed"}) {
    if (!doc.contains(key)) throw SchemaError(std::string("fixture: missing field '") + key + "'");
  }
  Fixture fx;
  fx.source = doc;
  if (!doc["kind"].is_string()) throw SchemaError("kind must be a string");
  ObjectiveKind kind;
  try {
    kind = objective_kind_from_string(doc["kind"].get<std::string>());
  } catch (const std::exception& e) {
    throw SchemaError(std::string("kind: ") + e.what());
  }
  const std::size_t d = unsigned_int(doc["d"], "d");
  if (d < 1) throw SchemaError("d must be >= 1");
  fx.seed = unsigned_int(doc["seed"], "seed");

  const Json& p = doc["parameters"];
  if (!p.is_object()) throw SchemaError("parameters must be an object");
  std::set<std::string> allowed{"box", "node_shifts"};
  switch (kind) {
    case ObjectiveKind::kSeparableQuadratic: allowed.insert("coefficients"); break;
    case ObjectiveKind::kShiftedQuadratic:
      allowed.insert({"coefficients", "shift"});
      break;
    case ObjectiveKind::kLogisticSynthetic:
      allowed.insert({"samples", "reg", "data_seed"});
      break;
    case ObjectiveKind::kRosenbrock: break;
  }
  reject_unknown(p, allowed, "parameters");
  std::optional<double> box;
  if (p.contains("box")) {
    box = number(p["box"], "parameters.box");
    if (!(*box > 0)) throw SchemaError("parameters.box must be positive");
  }
  const auto need = [&](const char* key) -> const Json& {
    if (!p.contains(key)) {
      throw SchemaError(std::string("parameters.") + key + " is required for kind " +
                        std::string(to_string(kind)));
    }
    return p[key];
  };

  try {
    switch (kind) {
      case ObjectiveKind::kSeparableQuadratic:
        fx.objective = make_separable_quadratic(
            vector_or_scalar(need("coefficients"), d, "parameters.coefficients"),
            box.value_or(10.0));
        break;
      case ObjectiveKind::kShiftedQuadratic:
        fx.objective = make_shifted_quadratic(
            vector_or_scalar(need("coefficients"), d, "parameters.coefficients"),
            vector_or_scalar(need("shift"), d, "parameters.shift"), box.value_or(10.0));
        break;
      case ObjectiveKind::kLogisticSynthetic:
        fx.objective = make_logistic_synthetic(
            d, unsigned_int(need("samples"), "parameters.samples"),
            number(need("reg"), "parameters.reg"),
            unsigned_int(need("data_seed"), "parameters.data_seed"), box.value_or(5.0));
        break;
      case ObjectiveKind::kRosenbrock:
        fx.objective = make_rosenbrock(d, box.value_or(2.0));
        break;
    }
  } catch (const ContractViolation& e) {
    throw SchemaError(std::string("parameters: ") + e.what());
  }
  fx.computed_L = fx.objective.L;
  fx.computed_L_inf = fx.objective.L_inf;
  fx.computed_f_star = fx.objective.f_star;

  if (doc.contains("f_star")) fx.objective.f_star = number(doc["f_star"], "f_star");
  if (doc.contains("L")) fx.objective.L = number(doc["L"], "L");
  if (doc.contains("L_inf")) fx.objective.L_inf = number(doc["L_inf"], "L_inf");
  if (doc.contains("L_sep")) fx.objective.L_sep = vector_or_scalar(doc["L_sep"], d, "L_sep");
  if (fx.objective.L < 0 || fx.objective.L_inf < 0) {
    throw SchemaError("smoothness constants must be >= 0");
  }
  if (fx.objective.L_sep) {
    for (double v : *fx.objective.L_sep) {
      if (v < 0) throw SchemaError("L_sep entries must be >= 0");
    }
  }

  fx.noise = doc.contains("noise") ? parse_noise(doc["noise"], d, fx.sigma_declared)
                                   : make_noise_none(d);

  if (doc.contains("n")) {
    fx.n = unsigned_int(doc["n"], "n");
    if (*fx.n < 1) throw SchemaError("n must be >= 1");
  }
  if (doc.contains("heterogeneity")) {
    fx.heterogeneity = number(doc["heterogeneity"], "heterogeneity");
    if (fx.heterogeneity < 0) throw SchemaError("heterogeneity must be >= 0");
  }
  if (p.contains("node_shifts")) {
    const Json& s = p["node_shifts"];
    if (!s.is_array() || s.empty()) {
      throw SchemaError("parameters.node_shifts must be a nonempty array");
    }
    std::vector<Vector> shifts;
    for (std::size_t j = 0; j < s.size(); ++j) {
      shifts.push_back(
          vector_or_scalar(s[j], d, "parameters.node_shifts[" + std::to_string(j) + "]"));
    }
    if (fx.n && *fx.n != shifts.size()) {
      throw SchemaError("n does not match the number of node_shifts");
    }
    if (doc.contains("heterogeneity")) {
      throw SchemaError("give heterogeneity or parameters.node_shifts, not both");
    }
    fx.n = shifts.size();
    fx.node_shifts = std::move(shifts);
  }
  return fx;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

Fixture load_fixture(const std::filesystem::path& path) {
  return parse_fixture(read_json_file(path));
}

std::uint64_t fixture_hash(const Fixture& fixture) {
  return fnv1a64(fixture.source.dump());
}

DistributedProblem build_distributed(const Fixture& fixture, std::optional<std::size_t> n) {
  DistributedProblem dp;
  if (fixture.node_shifts) {
    if (n && *n != fixture.node_shifts->size()) {
      throw ContractViolation("fixture lists " + std::to_string(fixture.node_shifts->size()) +
                              " node shifts but n = " + std::to_string(*n));
    }
    dp = make_distributed_with_shifts(fixture.objective, fixture.noise, *fixture.node_shifts);
    dp.seed = fixture.seed;
  } else {
    const std::size_t nodes = n ? *n : fixture.n.value_or(1);
    dp = make_distributed(fixture.objective, fixture.noise, nodes, fixture.heterogeneity,
                          fixture.seed);
  }
  // Declared constants win, as for the single objective.
  if (fixture.source.contains("L")) dp.L = fixture.objective.L;
  if (fixture.source.contains("L_inf")) dp.L_inf = fixture.objective.L_inf;
  return dp;
}

std::string run_record_csv(const RunRecord& record) {
  std::string out = "t,f,g_l1,g_l2,v_err_sq\n";
  for (std::size_t k = 0; k < record.f.size(); ++k) {
    out += std::to_string(k + 1);
    for (double v : {record.f[k], record.g_l1[k], record.g_l2[k], record.v_err_sq[k]}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

namespace {

// The json dumper already prints doubles in shortest round-trip form.
Json real(double v) { return Json(v); }

Json reals(const Vector& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(real(x));
  return a;
}

}  // namespace

Json run_record_sidecar(const RunRecord& record, std::uint64_t fixture_hash, const Json& extra) {
  Json j = Json::object();
  j["hyperparameters"] = {{"eta", real(record.hyper.eta)},
                          {"beta", real(record.hyper.beta)},
                          {"T", record.hyper.T}};
  j["seed"] = record.hyper.seed;
  j["tau"] = record.tau;
  j["x_tau"] = reals(record.x_tau);
  j["x_final"] = reals(record.x_final);
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fixture_hash));
  j["fixture_hash"] = std::string("fnv1a64:") + hex;
  for (const auto& [key, value] : extra.items()) j[key] = value;
  return j;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::string out = "axis,mean,std,trials\n";
  for (const SweepPoint& p : sweep.points) {
    out += format_double(p.value) + "," + format_double(p.mean) + "," + format_double(p.std) +
           "," + std::to_string(p.trials) + "\n";
  }
  return out;
}

Json sweep_json(const SweepResult& sweep, const std::optional<FitResult>& fit,
                const Json& extra) {
  Json j = Json::object();
  j["axis"] = std::string(to_string(sweep.axis));
  j["metric"] = std::string(to_string(sweep.metric));
  Json points = Json::array();
  for (const SweepPoint& p : sweep.points) {
    points.push_back({{"value", real(p.value)},
                      {"mean", real(p.mean)},
                      {"std", real(p.std)},
                      {"trials", p.trials}});
  }
  j["points"] = points;
  if (fit) {
    j["fit"] = {{"slope", real(fit->slope)},
                {"intercept", real(fit->intercept)},
                {"r_squared", real(fit->r_squared)}};
  }
  for (const auto& [key, value] : extra.items()) j[key] = value;
  return j;
}

SweepResult parse_sweep_csv(const std::string& text, Axis axis, Metric metric) {
  SweepResult sweep;
  sweep.axis = axis;
  sweep.metric = metric;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "axis,mean,std,trials") {
    throw SchemaError("sweep CSV must start with the header axis,mean,std,trials");
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (cells.size() != 4) {
      throw SchemaError("sweep CSV row " + std::to_string(row) + " does not have 4 columns");
    }
    SweepPoint p;
    double* targets[3] = {&p.value, &p.mean, &p.std};
    for (int c = 0; c < 3; ++c) {
      const std::string& s = cells[c];
      const auto res = std::from_chars(s.data(), s.data() + s.size(), *targets[c]);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw SchemaError("sweep CSV row " + std::to_string(row) + ": bad number '" + s + "'");
      }
    }
    const auto res =
        std::from_chars(cells[3].data(), cells[3].data() + cells[3].size(), p.trials);
    if (res.ec != std::errc() || res.ptr != cells[3].data() + cells[3].size()) {
      throw SchemaError("sweep CSV row " + std::to_string(row) + ": bad trial count");
    }
    sweep.points.push_back(p);
  }
  return sweep;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace signmom
