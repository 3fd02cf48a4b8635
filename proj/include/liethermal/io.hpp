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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "liethermal/circuit_builder.hpp"
#include "liethermal/control.hpp"
#include "liethermal/pauli_algebra.hpp"

namespace liethermal {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSolutionFormat = "liethermal-solution-v1";
inline constexpr const char* kAlgebraFormat = "liethermal-algebra-v1";

/// Shortest decimal text that parses back to the same double (at most 17
/// significant digits).
std::string format_number(double value);

/// Run-level parameters of one control problem.
struct ProblemConfig {
  int n = 4;
  std::array<double, 3> lambdas{0.0, 0.0, 1.0};
  double lambda_scale = 1.0;
  std::optional<std::string> preset;
  double g = 1.0;
  double t_f = 1.0;
  /// Slice count; 0 means discretization * n.
  int slices = 0;
  int discretization = 20;
  double h_bound = 0.0;  // non-positive means 5 g
  std::uint64_t seed = 0;
  int restarts = 4;
  int max_iter = 2000;
  double grad_tol = 1e-10;
  double J_tol = 1e-8;

  int slice_count() const { return slices > 0 ? slices : discretization * n; }
  /// Throws ValidationError naming the first offending field.
  void validate() const;
  ClusterIsingParams target_params() const;
  OptimizeConfig optimize_config() const;
};

ProblemConfig problem_config_from_json(const Json& j);
Json to_json(const ProblemConfig& config);

Json algebra_to_json(const LieBasis& basis);

/// With `reproducible`, timing fields are written as zero so reruns compare
/// byte for byte.
Json solution_to_json(const Solution& solution, bool reproducible = false);
Solution solution_from_json(const Json& j);

/// Throws ConsistencyError unless the solution was produced on `system`.
void check_basis(const Solution& solution, const ControlSystem& system);

/// Rebuilds the cluster target a solution was optimized for.
Eigen::VectorXd solution_target(const Solution& solution, const LieBasis& basis);

/// Gate list with the declarative postselection step.
Json circuit_to_json(const PreparationCircuit& circuit, const std::string& hash);

/// Plain-text tables: '#' comment lines, a header row, then data rows.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<double>& values);
  std::string render() const;
};

/// File helpers; every failure raises IoError with the path in the message.
Json read_json(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace liethermal
