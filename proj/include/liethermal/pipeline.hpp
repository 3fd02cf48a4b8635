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

#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "liethermal/control.hpp"
#include "liethermal/io.hpp"
#include "liethermal/thermal_sampling.hpp"

namespace liethermal {

inline constexpr const char* kToolVersion = "1.0.0";

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitValidation = 2,
  kExitNotConverged = 3,
  kExitIo = 4,
};

/// Maps a library exception to the exit code of its class.
int exit_code_for(const std::exception& e);

/// Prepared and target parent operators of a solution, ready for dense checks.
struct SolutionState {
  Eigen::VectorXd a0;      // P c with the rescaled c
  Eigen::VectorXd a_final;
  Eigen::VectorXd target;
  double J = 1.0;
};

SolutionState evolve_solution(const ControlSystem& system, const Solution& solution);

/// State infidelity of the prepared against the target thermal state at
/// each beta. Needs n <= kDenseSiteCap.
std::vector<double> state_infidelity_curve(const ControlSystem& system, const SolutionState& state,
                                           const std::vector<double>& betas);

/// Evenly spaced values from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, int steps);

/// Which checks a verification report runs.
enum class VerifyMode { Operator, State, GroundState, Propagation, Circuit, All };

VerifyMode parse_verify_mode(const std::string& name);

/// Report of the requested checks at one inverse temperature. Dense checks
/// beyond their site caps are recorded as skipped.
Json verify_report(const ControlSystem& system, const Solution& solution, VerifyMode mode,
                   double beta);

/// Curve columns (lambda_beta, state_infidelity, operator_infidelity).
CsvTable beta_curve_table(const ControlSystem& system, const Solution& solution,
                          const std::vector<double>& betas);

/// Curve columns (g_times_tf, best_J, restarts_used).
CsvTable scan_table(const ScanResult& scan, double g, const ProblemConfig& config,
                    const std::string& hash);

/// One row per sample: z_1..z_n as +-1, then the K0 eigenvalue.
CsvTable sample_table(const std::vector<SpinSample>& samples, const Solution& solution,
                      double beta, std::uint64_t seed);

struct RunManifest {
  std::string version = kToolVersion;
  std::string basis_hash;
  Json config;
  std::vector<std::pair<std::string, double>> stage_seconds;
  std::map<std::string, std::string> outputs;  // file name -> SHA-256
  std::string status = "ok";

  Json to_json() const;
};

struct PipelineOptions {
  std::filesystem::path out_dir = ".";
  bool best_effort = false;
  bool reproducible = false;
  int threads = 0;
  /// Verification inverse temperature; non-positive means 2 / lambda.
  double beta = 0.0;
  std::function<void(const std::string&)> log;
};

struct PipelineOutcome {
  int exit_code = kExitOk;
  std::string message;
  RunManifest manifest;
};

/// algebra -> optimize -> verify, writing algebra.json, solution.json,
/// report.json and manifest.json into the output directory. Errors are
/// reported with the failing stage; artifacts already written are kept.
PipelineOutcome run_pipeline(const ProblemConfig& config, const PipelineOptions& options);

}  // namespace liethermal
