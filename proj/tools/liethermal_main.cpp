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

// Command-line front end: algebra, optimize, qsl, verify, sample, circuit and
// pipeline subcommands over the liethermal library.

#include <cstdint>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "liethermal/circuit_builder.hpp"
#include "liethermal/control.hpp"
#include "liethermal/errors.hpp"
#include "liethermal/io.hpp"
#include "liethermal/parallel.hpp"
#include "liethermal/pipeline.hpp"
#include "liethermal/thermal_sampling.hpp"

using namespace liethermal;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool quiet = false;
};

class Logger {
 public:
  explicit Logger(const Globals& g) : quiet_(g.quiet) {}
  void operator()(const std::string& line) const {
    if (quiet_) return;
    std::lock_guard<std::mutex> lock(mutex_);
    std::cerr << line << '\n';
  }

 private:
  bool quiet_;
  mutable std::mutex mutex_;
};

/// Writes to `path`, or to standard output when the path is empty.
void deliver(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

ProblemConfig load_config(const std::string& path, const Globals& g) {
  ProblemConfig c = problem_config_from_json(read_json(path));
  if (g.seed) c.seed = *g.seed;
  return c;
}

struct LoadedSolution {
  Solution solution;
  ControlSystem system;
};

LoadedSolution load_solution(const std::string& path) {
  Solution s = solution_from_json(read_json(path));
  ControlSystem system = ControlSystem::build(s.n, s.g);
  check_basis(s, system);
  return {std::move(s), std::move(system)};
}

double default_beta(const Solution& s, double beta) {
  return beta >= 0.0 ? beta : 2.0 / s.lambda_scale;
}

std::function<void(int, int, double)> progress(const Logger& log) {
  return [&log](int restart, int iter, double J) {
    if (iter % 200 == 0) {
      log("restart " + std::to_string(restart) + " iteration " + std::to_string(iter) +
          " J = " + format_number(J));
    }
  };
}

int run_algebra(int n, const std::string& out, const Logger& log) {
  if (n < 2) throw ValidationError("--n: the algebra needs n >= 2");
  const LieBasis basis = enumerate_table1(n);
  deliver(out, algebra_to_json(basis).dump(2) + "\n");
  log("algebra: n = " + std::to_string(n) + ", dimension " + std::to_string(basis.dimension()));
  return kExitOk;
}

struct OptimizeArgs {
  std::string config, out, warm_start;
  int restarts = 0;
  bool reproducible = false;
};

int run_optimize(const OptimizeArgs& a, const Globals& g, const Logger& log) {
  ProblemConfig config = load_config(a.config, g);
  if (a.restarts > 0) config.restarts = a.restarts;
  config.validate();
  const ControlSystem system = ControlSystem::build(config.n, config.g);
  const ClusterIsingParams params = config.target_params();
  ControlProblem problem{cluster_ising_target(config.n, params, system.basis), config.t_f,
                         config.slice_count()};
  OptimizeConfig oc = config.optimize_config();
  oc.threads = g.threads;
  oc.on_iteration = progress(log);
  std::optional<Solution> warm;
  if (!a.warm_start.empty()) {
    warm = solution_from_json(read_json(a.warm_start));
    check_basis(*warm, system);
  }
  Solution s = optimize(system, problem, oc, warm ? &*warm : nullptr);
  s.lambdas = {params.lambda1 / params.lambda, params.lambda2 / params.lambda,
               params.lambda3 / params.lambda};
  s.lambda_scale = params.lambda;
  deliver(a.out, solution_to_json(s, a.reproducible).dump(2) + "\n");
  log("optimize: J = " + format_number(s.J) + " after " + std::to_string(s.iterations) +
      " iterations of restart " + std::to_string(s.restart));
  if (!s.converged) {
    std::cerr << "error: optimize: J = " << format_number(s.J) << " did not reach J_tol "
              << format_number(config.J_tol) << '\n';
    return kExitNotConverged;
  }
  return kExitOk;
}

struct QslArgs {
  std::string config, out;
  double tf_min = 0.0, tf_max = 0.0;
  int steps = 0;
  int discretization = 150;
  double drop_threshold = 1e-8;
};

int run_qsl(const QslArgs& a, const Globals& g, const Logger& log) {
  ProblemConfig config = load_config(a.config, g);
  if (!(a.tf_min > 0.0) || !(a.tf_max >= a.tf_min)) {
    throw ValidationError("--tf-min and --tf-max must satisfy 0 < min <= max");
  }
  if (a.discretization < 1) throw ValidationError("--discretization must be at least 1");
  config.discretization = a.discretization;
  config.slices = 0;
  const ControlSystem system = ControlSystem::build(config.n, config.g);
  const Eigen::VectorXd target =
      cluster_ising_target(config.n, config.target_params(), system.basis);
  ScanConfig sc;
  sc.optimize = config.optimize_config();
  sc.optimize.threads = g.threads;
  sc.discretization = a.discretization;
  sc.drop_threshold = a.drop_threshold;
  const ScanResult scan =
      qsl_scan(system, target, linear_grid(a.tf_min, a.tf_max, a.steps), sc,
               [&](const ScanPoint& p) {
                 log("qsl: g t_f = " + format_number(config.g * p.t_f) +
                     " best J = " + format_number(p.best_J));
               });
  deliver(a.out, scan_table(scan, config.g, config, system.hash).render());
  return kExitOk;
}

struct VerifyArgs {
  std::string solution, out, mode = "all", grid;
  double beta = -1.0;
};

int run_verify(const VerifyArgs& a, const Logger& log) {
  const auto loaded = load_solution(a.solution);
  if (!a.grid.empty()) {
    std::vector<std::string> parts;
    std::stringstream ss(a.grid);
    for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
    if (parts.size() != 3) throw ValidationError("--beta-grid expects min,max,steps");
    double lo = 0.0, hi = 0.0;
    int steps = 0;
    try {
      lo = std::stod(parts[0]);
      hi = std::stod(parts[1]);
      steps = std::stoi(parts[2]);
    } catch (const std::exception&) {
      throw ValidationError("--beta-grid expects min,max,steps");
    }
    if (lo < 0.0 || hi < lo) throw ValidationError("--beta-grid needs 0 <= min <= max");
    deliver(a.out,
            beta_curve_table(loaded.system, loaded.solution, linear_grid(lo, hi, steps)).render());
    log("verify: wrote " + std::to_string(steps) + " curve points");
    return kExitOk;
  }
  const double beta = default_beta(loaded.solution, a.beta);
  const Json report =
      verify_report(loaded.system, loaded.solution, parse_verify_mode(a.mode), beta);
  deliver(a.out, report.dump(2) + "\n");
  return kExitOk;
}

struct SampleArgs {
  std::string solution, out;
  double beta = -1.0;
  int count = 1000;
};

int run_sample(const SampleArgs& a, const Globals& g, const Logger& log) {
  const auto loaded = load_solution(a.solution);
  if (a.count < 0) throw ValidationError("--count must be nonnegative");
  const double beta = default_beta(loaded.solution, a.beta);
  const std::uint64_t seed = g.seed.value_or(0);
  const ChainTables tables = chain_tables(loaded.solution.c, beta);
  const auto samples = draw_samples(tables, a.count, seed, g.threads);
  deliver(a.out, sample_table(samples, loaded.solution, beta, seed).render());
  log("sample: " + std::to_string(a.count) + " samples, acceptance " +
      format_number(tables.normalization));
  return kExitOk;
}

struct CircuitArgs {
  std::string solution, out, format = "json";
  double beta = -1.0;
};

int run_circuit(const CircuitArgs& a) {
  const auto loaded = load_solution(a.solution);
  const double beta = default_beta(loaded.solution, a.beta);
  const PreparationCircuit circuit = build_circuit(loaded.solution.c, beta);
  const std::string text = a.format == "text"
                               ? circuit_text(circuit)
                               : circuit_to_json(circuit, loaded.system.hash).dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text(a.out, text);
  }
  std::cout << "P_s = " << format_number(circuit.success_probability) << '\n';
  return kExitOk;
}

struct PipelineArgs {
  std::string config, out_dir = ".";
  bool best_effort = false;
  bool reproducible = false;
  double beta = -1.0;
};

int run_pipeline_command(const PipelineArgs& a, const Globals& g, const Logger& log) {
  ProblemConfig config;
  try {
    config = load_config(a.config, g);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("validate: ") + e.what());
  }
  PipelineOptions options;
  options.out_dir = a.out_dir;
  options.best_effort = a.best_effort;
  options.reproducible = a.reproducible;
  options.threads = g.threads;
  options.beta = a.beta;
  options.log = [&log](const std::string& line) { log(line); };
  const PipelineOutcome outcome = run_pipeline(config, options);
  if (outcome.exit_code != kExitOk) std::cerr << "error: " << outcome.message << '\n';
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermal-state preparation by operator-space optimal control", "liethermal"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kToolVersion);

  Globals globals;
  app.add_option("--seed", globals.seed, "Random seed (overrides config files)");
  app.add_option("--threads", globals.threads,
                 "Worker threads; 0 uses " + std::string(kThreadsEnv) + " or all cores")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet,-q", globals.quiet, "Suppress progress output");

  int algebra_n = 0;
  std::string algebra_out;
  auto* algebra = app.add_subcommand("algebra", "Write the operator basis as JSON");
  algebra->add_option("--n", algebra_n, "Chain length")->required();
  algebra->add_option("--out", algebra_out, "Output path (default: standard output)");

  OptimizeArgs opt;
  auto* optimize_cmd = app.add_subcommand("optimize", "Optimize a control protocol");
  optimize_cmd->add_option("--config", opt.config, "Problem config JSON")->required();
  optimize_cmd->add_option("--out", opt.out, "Solution JSON path (default: standard output)");
  optimize_cmd->add_option("--restarts", opt.restarts, "Random restarts (overrides config)");
  optimize_cmd->add_option("--warm-start", opt.warm_start, "Solution JSON used as restart 0");
  optimize_cmd->add_flag("--reproducible", opt.reproducible, "Write timing fields as zero");

  QslArgs qsl;
  auto* qsl_cmd = app.add_subcommand("qsl", "Scan the final time for the infidelity drop");
  qsl_cmd->add_option("--config", qsl.config, "Problem config JSON")->required();
  qsl_cmd->add_option("--tf-min", qsl.tf_min, "Smallest final time")->required();
  qsl_cmd->add_option("--tf-max", qsl.tf_max, "Largest final time")->required();
  qsl_cmd->add_option("--steps", qsl.steps, "Grid points")->required();
  qsl_cmd->add_option("--out", qsl.out, "Curve CSV path (default: standard output)");
  qsl_cmd->add_option("--discretization", qsl.discretization, "Slices per site")
      ->capture_default_str();
  qsl_cmd->add_option("--drop-threshold", qsl.drop_threshold, "J that marks the drop")
      ->capture_default_str();

  VerifyArgs ver;
  auto* verify_cmd = app.add_subcommand("verify", "Check a solution against dense oracles");
  verify_cmd->add_option("--solution", ver.solution, "Solution JSON")->required();
  verify_cmd->add_option("--mode", ver.mode, "operator|state|gsbound|propagation|circuit|all")
      ->check(CLI::IsMember({"operator", "state", "gsbound", "propagation", "circuit", "all"}));
  verify_cmd->add_option("--beta", ver.beta, "Inverse temperature (default 2 / lambda)");
  verify_cmd->add_option("--beta-grid", ver.grid, "min,max,steps: write an infidelity curve");
  verify_cmd->add_option("--out", ver.out, "Report JSON or curve CSV (default: standard output)");

  SampleArgs smp;
  auto* sample_cmd = app.add_subcommand("sample", "Draw spin strings of the initial state");
  sample_cmd->add_option("--solution", smp.solution, "Solution JSON")->required();
  sample_cmd->add_option("--beta", smp.beta, "Inverse temperature (default 2 / lambda)");
  sample_cmd->add_option("--count", smp.count, "Number of samples")
      ->capture_default_str();
  sample_cmd->add_option("--out", smp.out, "Sample CSV path (default: standard output)");

  CircuitArgs circ;
  auto* circuit_cmd = app.add_subcommand("circuit", "Compile the initial-state circuit");
  circuit_cmd->add_option("--solution", circ.solution, "Solution JSON")->required();
  circuit_cmd->add_option("--beta", circ.beta, "Inverse temperature (default 2 / lambda)");
  circuit_cmd->add_option("--format", circ.format, "json|text")
      ->capture_default_str()
      ->check(CLI::IsMember({"json", "text"}));
  circuit_cmd->add_option("--out", circ.out, "Output path (default: standard output)");

  PipelineArgs pipe;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run algebra, optimize and verify");
  pipeline_cmd->add_option("--config", pipe.config, "Problem config JSON")->required();
  pipeline_cmd->add_option("--out-dir", pipe.out_dir, "Artifact directory")
      ->capture_default_str();
  pipeline_cmd->add_option("--beta", pipe.beta, "Verification inverse temperature");
  pipeline_cmd->add_flag("--best-effort", pipe.best_effort, "Exit 0 even without convergence");
  pipeline_cmd->add_flag("--reproducible", pipe.reproducible, "Write timing fields as zero");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  const Logger log(globals);
  try {
    if (*algebra) return run_algebra(algebra_n, algebra_out, log);
    if (*optimize_cmd) return run_optimize(opt, globals, log);
    if (*qsl_cmd) return run_qsl(qsl, globals, log);
    if (*verify_cmd) return run_verify(ver, log);
    if (*sample_cmd) return run_sample(smp, globals, log);
    if (*circuit_cmd) return run_circuit(circ);
    if (*pipeline_cmd) return run_pipeline_command(pipe, globals, log);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitFailure;
}
