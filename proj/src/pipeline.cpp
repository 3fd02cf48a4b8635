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

#include "liethermal/pipeline.hpp"

#include <chrono>
#include <cmath>

#include "liethermal/circuit_builder.hpp"
#include "liethermal/digest.hpp"
#include "liethermal/errors.hpp"
#include "liethermal/verifier.hpp"

namespace liethermal {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Json skipped(const std::string& why) { return Json{{"skipped", why}}; }

std::string cap_text(const char* what, int cap) {
  return std::string(what) + " is limited to n <= " + std::to_string(cap);
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const InfeasibleAlignment*>(&e)) return kExitNotConverged;
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const InvalidInput*>(&e) ||
      dynamic_cast<const ConsistencyError*>(&e) || dynamic_cast<const UnsupportedSize*>(&e) ||
      dynamic_cast<const SizeError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
      dynamic_cast<const LayoutError*>(&e) || dynamic_cast<const UnknownGenerator*>(&e)) {
    return kExitValidation;
  }
  return kExitFailure;
}

SolutionState evolve_solution(const ControlSystem& system, const Solution& solution) {
  check_basis(solution, system);
  SolutionState s;
  s.target = solution_target(solution, system.basis);
  s.a0 = initial_vector(system.basis, solution.c);
  s.a_final = propagate(s.a0, solution.protocol, system.tensor);
  s.J = operator_infidelity(s.a_final, s.target, s.a0.norm());
  return s;
}

std::vector<double> state_infidelity_curve(const ControlSystem& system, const SolutionState& state,
                                           const std::vector<double>& betas) {
  if (system.n() > kDenseSiteCap) throw SizeError(cap_text("dense verification", kDenseSiteCap));
  const ThermalSpectrum prepared(realize_dense(state.a_final, system.basis));
  const ThermalSpectrum target(realize_dense(state.target, system.basis));
  std::vector<double> out;
  out.reserve(betas.size());
  for (double beta : betas) {
    out.push_back(state_infidelity(prepared.state(beta), target.state(beta)));
  }
  return out;
}

std::vector<double> linear_grid(double lo, double hi, int steps) {
  if (steps < 1 || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ValidationError("grid needs finite bounds and at least one step");
  }
  std::vector<double> grid;
  if (steps == 1) return {lo};
  for (int i = 0; i < steps; ++i) grid.push_back(lo + (hi - lo) * i / (steps - 1));
  return grid;
}

VerifyMode parse_verify_mode(const std::string& name) {
  if (name == "operator") return VerifyMode::Operator;
  if (name == "state") return VerifyMode::State;
  if (name == "gsbound") return VerifyMode::GroundState;
  if (name == "propagation") return VerifyMode::Propagation;
  if (name == "circuit") return VerifyMode::Circuit;
  if (name == "all") return VerifyMode::All;
  throw ValidationError("unknown verify mode '" + name + "'");
}

Json verify_report(const ControlSystem& system, const Solution& solution, VerifyMode mode,
                   double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be >= 0");
  const auto wants = [mode](VerifyMode m) { return mode == VerifyMode::All || mode == m; };
  const SolutionState state = evolve_solution(system, solution);
  const int n = system.n();

  Json r;
  r["format"] = "liethermal-report-v1";
  r["n"] = n;
  r["basis_hash"] = system.hash;
  r["beta"] = beta;
  r["lambda_beta"] = beta * solution.lambda_scale;
  r["converged"] = solution.converged;
  if (wants(VerifyMode::Operator)) {
    r["operator_infidelity"] = state.J;
    r["stored_operator_infidelity"] = solution.J;
  }
  if (wants(VerifyMode::State)) {
    if (n <= kDenseSiteCap) {
      r["state_infidelity"] = state_infidelity_curve(system, state, {beta})[0];
    } else {
      r["state_infidelity"] = skipped(cap_text("dense verification", kDenseSiteCap));
    }
  }
  if (wants(VerifyMode::GroundState)) {
    if (n <= kDenseSiteCap) {
      try {
        const auto b = ground_state_bound(state.a_final, state.target, system.basis);
        r["ground_state"] = {{"bound", b.bound},
                             {"infidelity", b.infidelity},
                             {"e0", b.e0},
                             {"e1", b.e1}};
      } catch (const DegenerateGap& e) {
        r["ground_state"] = {{"error", e.what()}};
      }
    } else {
      r["ground_state"] = skipped(cap_text("dense verification", kDenseSiteCap));
    }
  }
  if (wants(VerifyMode::Propagation)) {
    if (n <= kDensePropagationCap) {
      r["propagation_max_error"] = dense_propagate_check(solution.c, solution.protocol, system);
    } else {
      r["propagation_max_error"] = skipped(cap_text("dense propagation", kDensePropagationCap));
    }
  }
  if (wants(VerifyMode::Circuit)) {
    const PreparationCircuit circuit = build_circuit(solution.c, beta);
    Json c{{"predicted_success_probability", circuit.success_probability}};
    if (circuit.qubit_count() <= kCircuitQubitCap) {
      const auto sim = simulate_circuit(circuit);
      const auto rho = thermal_state(initial_operator(solution.c, system.basis), beta);
      c["simulated_success_probability"] = sim.success_probability;
      c["state_infidelity"] = state_infidelity(sim.reduced, rho);
    } else {
      c["simulation"] = "skipped: at most " + std::to_string(kCircuitQubitCap) + " qubits";
    }
    r["circuit"] = c;
  }
  return r;
}

CsvTable beta_curve_table(const ControlSystem& system, const Solution& solution,
                          const std::vector<double>& betas) {
  const SolutionState state = evolve_solution(system, solution);
  const auto curve = state_infidelity_curve(system, state, betas);
  CsvTable t;
  t.comments = {"state and operator infidelity against lambda * beta; all columns dimensionless",
                "basis_hash " + system.hash, "n " + std::to_string(system.n()),
                "seed " + std::to_string(solution.seed)};
  t.columns = {"lambda_beta", "state_infidelity", "operator_infidelity"};
  for (std::size_t i = 0; i < betas.size(); ++i) {
    t.add_row({betas[i] * solution.lambda_scale, curve[i], state.J});
  }
  return t;
}

CsvTable scan_table(const ScanResult& scan, double g, const ProblemConfig& config,
                    const std::string& hash) {
  CsvTable t;
  t.comments = {"best operator infidelity against g * t_f; both dimensionless",
                "basis_hash " + hash, "n " + std::to_string(config.n),
                "seed " + std::to_string(config.seed),
                "slices " + std::to_string(config.slice_count())};
  if (scan.t_min) {
    t.comments.push_back("drop at g_times_tf " + format_number(g * *scan.t_min) + " ratio " +
                         format_number(scan.drop_ratio));
  } else {
    t.comments.push_back("no drop detected");
  }
  t.columns = {"g_times_tf", "best_J", "restarts_used"};
  for (const auto& p : scan.points) {
    t.rows.push_back({format_number(g * p.t_f), format_number(p.best_J),
                      std::to_string(p.restarts_used)});
  }
  return t;
}

CsvTable sample_table(const std::vector<SpinSample>& samples, const Solution& solution,
                      double beta, std::uint64_t seed) {
  CsvTable t;
  t.comments = {"spin samples of exp(-beta K0) / Z; |0> <-> z = +1",
                "basis_hash " + solution.basis_hash, "seed " + std::to_string(seed),
                "beta " + format_number(beta),
                "substream_length " + std::to_string(kSampleStreamLength)};
  for (int j = 1; j <= solution.n; ++j) t.columns.push_back("z_" + std::to_string(j));
  t.columns.push_back("k0_eigenvalue");
  for (const auto& s : samples) {
    std::vector<std::string> row;
    for (int z : s.z) row.push_back(z > 0 ? "1" : "-1");
    row.push_back(format_number(k0_eigenvalue(solution.c, s.z)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Json RunManifest::to_json() const {
  Json j;
  j["format"] = "liethermal-manifest-v1";
  j["version"] = version;
  j["status"] = status;
  j["basis_hash"] = basis_hash;
  j["config"] = config;
  Json stages = Json::array();
  for (const auto& [name, secs] : stage_seconds) {
    stages.push_back({{"stage", name}, {"seconds", secs}});
  }
  j["stages"] = stages;
  j["outputs"] = outputs;
  return j;
}

PipelineOutcome run_pipeline(const ProblemConfig& config, const PipelineOptions& options) {
  PipelineOutcome out;
  auto log = [&options](const std::string& line) {
    if (options.log) options.log(line);
  };
  auto emit = [&](const std::string& name, const Json& j) {
    const auto path = options.out_dir / name;
    write_json(path, j);
    out.manifest.outputs[name] = sha256_file(path);
  };
  auto record = [&](const std::string& stage, Clock::time_point start) {
    const double secs = options.reproducible ? 0.0 : seconds_since(start);
    out.manifest.stage_seconds.emplace_back(stage, secs);
  };

  std::string stage = "validate";
  out.manifest.config = to_json(config);
  try {
    config.validate();

    stage = "algebra";
    auto start = Clock::now();
    const ControlSystem system = ControlSystem::build(config.n, config.g);
    out.manifest.basis_hash = system.hash;
    emit("algebra.json", algebra_to_json(system.basis));
    record(stage, start);
    log("algebra: n = " + std::to_string(config.n) + ", dimension " +
        std::to_string(system.dimension()));

    stage = "optimize";
    start = Clock::now();
    const ClusterIsingParams params = config.target_params();
    ControlProblem problem{cluster_ising_target(config.n, params, system.basis), config.t_f,
                           config.slice_count()};
    OptimizeConfig oc = config.optimize_config();
    oc.threads = options.threads;
    Solution solution = optimize(system, problem, oc);
    solution.lambdas = {params.lambda1 / params.lambda, params.lambda2 / params.lambda,
                        params.lambda3 / params.lambda};
    solution.lambda_scale = params.lambda;
    emit("solution.json", solution_to_json(solution, options.reproducible));
    record(stage, start);
    log("optimize: J = " + format_number(solution.J) +
        (solution.converged ? " (converged)" : " (not converged)"));

    stage = "verify";
    start = Clock::now();
    const double beta = options.beta > 0.0 ? options.beta : 2.0 / params.lambda;
    emit("report.json", verify_report(system, solution, VerifyMode::All, beta));
    record(stage, start);
    log("verify: report written");

    if (!solution.converged) {
      out.manifest.status = options.best_effort ? "not converged (best effort)" : "not converged";
      if (!options.best_effort) {
        out.exit_code = kExitNotConverged;
        out.message = "optimize: J = " + format_number(solution.J) + " did not reach J_tol " +
                      format_number(config.J_tol);
      }
    }
  } catch (const std::exception& e) {
    out.exit_code = exit_code_for(e);
    out.message = stage + ": " + e.what();
    out.manifest.status = "failed at " + stage;
  }

  try {
    write_json(options.out_dir / "manifest.json", out.manifest.to_json());
  } catch (const IoError& e) {
    if (out.exit_code == kExitOk) {
      out.exit_code = kExitIo;
      out.message = std::string("manifest: ") + e.what();
    }
  }
  return out;
}

}  // namespace liethermal
