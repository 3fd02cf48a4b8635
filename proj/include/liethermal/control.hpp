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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "liethermal/dynamics.hpp"
#include "liethermal/models.hpp"
#include "liethermal/pauli_algebra.hpp"

namespace liethermal {

/// Basis, channel layout and structure tensor of one chain length.
struct ControlSystem {
  LieBasis basis;
  ControlLayout layout;
  StructureTensor tensor;
  std::string hash;

  static ControlSystem build(int n, double g);
  int n() const { return basis.n; }
  int dimension() const { return basis.dimension(); }
  int channels() const { return layout.channel_count(); }
};

/// J = 1 - (a_f . a_T) / (norm_a0 |a_T|).
double operator_infidelity(const Eigen::VectorXd& a_f, const Eigen::VectorXd& a_target,
                           double norm_a0);

/// a(0) = P c: c[0] on the parity string, c[j] on Z_j.
Eigen::VectorXd initial_vector(const LieBasis& basis, const Eigen::VectorXd& c);

/// P^T a, the inverse selection.
Eigen::VectorXd select_initial(const LieBasis& basis, const Eigen::VectorXd& a);

enum class GradientOrder {
  /// Expansion of each slice derivative through second order in tau.
  Second,
  /// The same expansion continued until its terms drop below round-off.
  Exact,
};

/**
 * dJ/dh for every slice and control channel.
 *
 * The slice derivative is expanded around the state after the slice, so
 * dJ/dh_{k,m} = -tau_m b^T (Lambda_k + tau_m/2 [G_m, Lambda_k] + ...) a / (V A)
 * with a = forward column m + 1 and b = backward column m + 1.
 */
ControlMatrix control_gradient(const SweepCache& cache, const Protocol& protocol,
                               const StructureTensor& tensor,
                               GradientOrder order = GradientOrder::Second);

/// dJ/dc including the dependence of V = |c| on c.
Eigen::VectorXd initial_gradient(const SweepCache& cache, const LieBasis& basis);

/// (a_f . a_T) / (a_T . a_T); throws InfeasibleAlignment when not positive.
double rescale_initial(const Eigen::VectorXd& a_f, const Eigen::VectorXd& a_target);

struct ControlProblem {
  Eigen::VectorXd target;
  double t_f = 1.0;
  int slices = 1;
};

struct OptimizeConfig {
  int restarts = 4;
  std::uint64_t seed = 0;
  int max_iter = 2000;
  double grad_tol = 1e-10;
  double J_tol = 1e-8;
  /// Box bound on |h|; non-positive means 5 g.
  double h_bound = 0.0;
  int memory = 10;
  GradientOrder gradient = GradientOrder::Exact;
  double prop_tol = 1e-12;
  /// Worker threads for restarts; 0 defers to worker_count().
  int threads = 0;
  /// Called with (restart, iteration, J) at the start and after every
  /// accepted step. May run on several threads at once.
  std::function<void(int, int, double)> on_iteration;
};

struct Solution {
  int n = 0;
  double g = 1.0;
  std::string basis_hash;
  Eigen::VectorXd c;  // after rescaling
  double c_scale = 1.0;
  Protocol protocol;
  double J = 1.0;
  std::uint64_t seed = 0;
  bool converged = false;
  double wall_seconds = 0.0;
  int iterations = 0;
  int restart = 0;
  int restarts_used = 0;
  /// Cluster Ising weights of the target, when known.
  std::array<double, 3> lambdas{0.0, 0.0, 0.0};
  double lambda_scale = 1.0;
};

/// Best restart of the joint minimization of J over (h, c). Never throws on
/// non-convergence; check `converged`. A warm start, when given, is restart 0.
Solution optimize(const ControlSystem& system, const ControlProblem& problem,
                  const OptimizeConfig& config, const Solution* warm_start = nullptr);

/// Operator infidelity of a solution's (c, protocol) against `target`.
double evaluate_solution(const ControlSystem& system, const Solution& solution,
                         const Eigen::VectorXd& target, double prop_tol = 1e-12);

struct ContinuationResult {
  Solution solution;
  int stage = 0;  // last stage reached with a converged solution
  bool completed = false;
  std::vector<double> stage_J;
};

/// Walks the target from `from` to `to` in `steps` linear stages, warm
/// starting each stage from the previous one.
ContinuationResult continuation(const ControlSystem& system, const Solution& previous,
                                const Eigen::VectorXd& from, const Eigen::VectorXd& to,
                                int steps, const OptimizeConfig& config);

struct ScanPoint {
  double t_f = 0.0;
  double best_J = 1.0;
  int restarts_used = 0;
};

struct ScanResult {
  std::vector<ScanPoint> points;
  std::optional<double> t_min;  // first t_f with J below the threshold
  double drop_ratio = 0.0;      // J before the drop over J at the drop
};

struct ScanConfig {
  OptimizeConfig optimize;
  /// Slices per site; M = factor * n.
  int discretization = 150;
  double drop_threshold = 1e-8;
};

ScanResult qsl_scan(const ControlSystem& system, const Eigen::VectorXd& target,
                    const std::vector<double>& t_grid, const ScanConfig& config,
                    const std::function<void(const ScanPoint&)>& progress = {});

/// Locates the drop in an existing curve (used by qsl_scan).
void detect_drop(ScanResult& result, double threshold);

}  // namespace liethermal
