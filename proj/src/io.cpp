// Copyright 2026 The liethermal Authors
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

#include "liethermal/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "liethermal/errors.hpp"

namespace liethermal {

namespace {

constexpr int kMaxConfigSites = 64;

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

template <typename T>
T field(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
void optional_field(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = field<T>(j, key);
}

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

Eigen::VectorXd vector_from(const Json& j, const char* key) {
  const auto values = field<std::vector<double>>(j, key);
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void ProblemConfig::validate() const {
  require(n >= 3, "n: the cluster target needs n >= 3, got " + std::to_string(n));
  require(n <= kMaxConfigSites, "n: at most 64 sites are supported");
  try {
    target_params();
  } catch (const InvalidInput& e) {
    throw ValidationError(std::string("lambdas: ") + e.what());
  }
  require(std::isfinite(g) && g > 0.0, "g: must be positive");
  require(std::isfinite(t_f) && t_f > 0.0, "t_f: must be positive");
  require(slices >= 0, "slices: must be nonnegative");
  require(discretization >= 1, "discretization: must be at least 1");
  require(std::isfinite(h_bound) && h_bound >= 0.0, "h_bound: must be nonnegative");
  require(restarts >= 1, "restarts: must be at least 1");
  require(max_iter >= 0, "max_iter: must be nonnegative");
  require(std::isfinite(grad_tol) && grad_tol >= 0.0, "grad_tol: must be nonnegative");
  require(std::isfinite(J_tol) && J_tol >= 0.0, "J_tol: must be nonnegative");
}

ClusterIsingParams ProblemConfig::target_params() const {
  if (preset) {
    auto p = find_preset(*preset);
    if (!p) throw InvalidInput("unknown preset '" + *preset + "'");
    return normalize_params(p->weights, lambda_scale);
  }
  return normalize_params(lambdas, lambda_scale);
}

OptimizeConfig ProblemConfig::optimize_config() const {
  OptimizeConfig c;
  c.restarts = restarts;
  c.seed = seed;
  c.max_iter = max_iter;
  c.grad_tol = grad_tol;
  c.J_tol = J_tol;
  c.h_bound = h_bound;
  return c;
}

ProblemConfig problem_config_from_json(const Json& j) {
  require(j.is_object(), "config must be a JSON object");
  static const std::set<std::string> known = {
      "n", "lambdas", "lambda_scale", "preset", "g", "t_f", "slices", "discretization",
      "h_bound", "seed", "restarts", "tolerances"};
  for (const auto& item : j.items()) {
    require(known.count(item.key()) == 1, "unknown config field '" + item.key() + "'");
  }
  ProblemConfig c;
  c.n = field<int>(j, "n");
  if (j.contains("lambdas")) {
    const auto l = field<std::vector<double>>(j, "lambdas");
    require(l.size() == 3, "lambdas: expected three weights");
    c.lambdas = {l[0], l[1], l[2]};
  }
  if (j.contains("preset")) {
    require(!j.contains("lambdas"), "give either lambdas or preset, not both");
    c.preset = field<std::string>(j, "preset");
  }
  optional_field(j, "lambda_scale", c.lambda_scale);
  optional_field(j, "g", c.g);
  optional_field(j, "t_f", c.t_f);
  optional_field(j, "slices", c.slices);
  optional_field(j, "discretization", c.discretization);
  optional_field(j, "h_bound", c.h_bound);
  optional_field(j, "seed", c.seed);
  optional_field(j, "restarts", c.restarts);
  if (j.contains("tolerances")) {
    const Json& t = j.at("tolerances");
    require(t.is_object(), "tolerances must be an object");
    for (const auto& item : t.items()) {
      require(item.key() == "grad_tol" || item.key() == "J_tol" || item.key() == "max_iter",
              "unknown tolerance '" + item.key() + "'");
    }
    optional_field(t, "grad_tol", c.grad_tol);
    optional_field(t, "J_tol", c.J_tol);
    optional_field(t, "max_iter", c.max_iter);
  }
  c.validate();
  return c;
}

Json to_json(const ProblemConfig& c) {
  Json j;
  j["n"] = c.n;
  if (c.preset) {
    j["preset"] = *c.preset;
  } else {
    j["lambdas"] = c.lambdas;
  }
  j["lambda_scale"] = c.lambda_scale;
  j["g"] = c.g;
  j["t_f"] = c.t_f;
  j["slices"] = c.slice_count();
  j["h_bound"] = c.h_bound;
  j["seed"] = c.seed;
  j["restarts"] = c.restarts;
  j["tolerances"] = {{"grad_tol", c.grad_tol}, {"J_tol", c.J_tol}, {"max_iter", c.max_iter}};
  return j;
}

Json algebra_to_json(const LieBasis& basis) {
  Json j;
  j["format"] = kAlgebraFormat;
  j["n"] = basis.n;
  j["dimension"] = basis.dimension();
  j["basis_hash"] = basis_hash(basis);
  Json elements = Json::array();
  char hex[24];
  for (int i = 0; i < basis.dimension(); ++i) {
    const auto& e = basis.elements[static_cast<std::size_t>(i)];
    Json item;
    std::snprintf(hex, sizeof(hex), "0x%llx", static_cast<unsigned long long>(e.x_mask));
    item["x"] = hex;
    std::snprintf(hex, sizeof(hex), "0x%llx", static_cast<unsigned long long>(e.z_mask));
    item["z"] = hex;
    item["word"] = e.to_string();
    item["label"] = basis.cartan_label[static_cast<std::size_t>(i)] == CartanLabel::K ? "K" : "M";
    elements.push_back(item);
  }
  j["mask_convention"] = "bit s-1 of each mask is site s";
  j["elements"] = elements;
  j["h_indices"] = basis.h_indices;
  return j;
}

Json solution_to_json(const Solution& s, bool reproducible) {
  Json j;
  j["format"] = kSolutionFormat;
  j["n"] = s.n;
  j["g"] = s.g;
  j["basis_hash"] = s.basis_hash;
  j["lambdas"] = s.lambdas;
  j["lambda_scale"] = s.lambda_scale;
  j["t_f"] = s.protocol.total_time();
  j["c"] = vector_json(s.c);
  j["c_scale"] = s.c_scale;
  j["tau"] = s.protocol.tau;
  Json h = Json::array();
  for (int m = 0; m < s.protocol.slices(); ++m) {
    Json row = Json::array();
    for (int k = 0; k < s.protocol.channels(); ++k) row.push_back(s.protocol.h(m, k));
    h.push_back(row);
  }
  j["h"] = h;
  j["J"] = s.J;
  j["seed"] = s.seed;
  j["converged"] = s.converged;
  j["iterations"] = s.iterations;
  j["restart"] = s.restart;
  j["restarts_used"] = s.restarts_used;
  j["wall_seconds"] = reproducible ? 0.0 : s.wall_seconds;
  return j;
}

Solution solution_from_json(const Json& j) {
  require(j.is_object(), "solution must be a JSON object");
  if (j.contains("format")) {
    require(field<std::string>(j, "format") == kSolutionFormat, "unsupported solution format");
  }
  Solution s;
  s.n = field<int>(j, "n");
  require(s.n >= 2 && s.n <= kMaxConfigSites, "n: out of range");
  optional_field(j, "g", s.g);
  s.basis_hash = field<std::string>(j, "basis_hash");
  optional_field(j, "lambdas", s.lambdas);
  optional_field(j, "lambda_scale", s.lambda_scale);
  s.c = vector_from(j, "c");
  require(s.c.size() == s.n + 1, "c: expected n + 1 coefficients");
  s.c_scale = field<double>(j, "c_scale");
  s.protocol.g = s.g;
  s.protocol.tau = field<std::vector<double>>(j, "tau");
  const auto rows = field<std::vector<std::vector<double>>>(j, "h");
  require(rows.size() == s.protocol.tau.size(), "h: expected one row per slice");
  const int channels = s.n + 2;
  s.protocol.h = ControlMatrix(static_cast<Eigen::Index>(rows.size()), channels);
  for (std::size_t m = 0; m < rows.size(); ++m) {
    require(static_cast<int>(rows[m].size()) == channels, "h: expected n + 2 channels per slice");
    for (int k = 0; k < channels; ++k) {
      s.protocol.h(static_cast<Eigen::Index>(m), k) = rows[m][static_cast<std::size_t>(k)];
    }
  }
  try {
    s.protocol.validate();
  } catch (const Error& e) {
    throw ValidationError(std::string("protocol: ") + e.what());
  }
  s.J = field<double>(j, "J");
  optional_field(j, "seed", s.seed);
  optional_field(j, "converged", s.converged);
  optional_field(j, "iterations", s.iterations);
  optional_field(j, "restart", s.restart);
  optional_field(j, "restarts_used", s.restarts_used);
  optional_field(j, "wall_seconds", s.wall_seconds);
  return s;
}

void check_basis(const Solution& solution, const ControlSystem& system) {
  if (solution.n != system.n() || solution.basis_hash != system.hash) {
    throw ConsistencyError("solution basis hash " + solution.basis_hash +
                           " does not match the basis " + system.hash);
  }
  if (solution.protocol.channels() != system.channels()) {
    throw ConsistencyError("solution channel count does not match the control layout");
  }
}

Eigen::VectorXd solution_target(const Solution& solution, const LieBasis& basis) {
  try {
    const auto params = normalize_params(solution.lambdas, solution.lambda_scale);
    return cluster_ising_target(solution.n, params, basis);
  } catch (const InvalidInput& e) {
    throw ValidationError(std::string("solution target: ") + e.what());
  }
}

Json circuit_to_json(const PreparationCircuit& circuit, const std::string& hash) {
  Json j;
  j["format"] = "liethermal-circuit-v1";
  j["n"] = circuit.n;
  j["beta"] = circuit.beta;
  j["basis_hash"] = hash;
  j["qubits"] = circuit.qubit_count();
  j["rotation"] = "ry(a) = exp(-i a Y)";
  Json gates = Json::array();
  for (const auto& g : circuit.gates) {
    Json item{{"gate", g.name}, {"qubits", g.qubits}};
    if (g.name == "ry") item["angle"] = g.angle;
    gates.push_back(item);
  }
  j["gates"] = gates;
  j["measure"] = {{"qubit", circuit.parity_qubit},
                  {"accepted_outcome", circuit.accepted_outcome},
                  {"predicted_success_probability", circuit.success_probability}};
  return j;
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> row;
  row.reserve(values.size());
  for (double v : values) row.push_back(format_number(v));
  rows.push_back(std::move(row));
}

std::string CsvTable::render() const {
  std::ostringstream out;
  for (const auto& c : comments) out << "# " << c << '\n';
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(columns);
  for (const auto& r : rows) line(r);
  return out.str();
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read " + path.string());
  return text;
}

Json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("cannot write " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

}  // namespace liethermal
