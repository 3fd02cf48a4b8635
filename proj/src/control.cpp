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

#include "liethermal/control.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <string>

#include "liethermal/errors.hpp"
#include "liethermal/parallel.hpp"

namespace liethermal {

ControlSystem ControlSystem::build(int n, double g) {
  ControlSystem s;
  s.basis = enumerate_table1(n);
  s.layout = make_control_layout(n, g);
  s.tensor = system_tensor(s.basis, s.layout);
  s.hash = basis_hash(s.basis);
  return s;
}

double operator_infidelity(const Eigen::VectorXd& a_f, const Eigen::VectorXd& a_target,
                           double norm_a0) {
  if (a_f.size() != a_target.size()) throw DimensionError("vector length mismatch");
  const double norm_target = a_target.norm();
  if (!(norm_a0 > 0.0) || !(norm_target > 0.0)) {
    throw InvalidInput("operator infidelity needs nonzero norms");
  }
  return 1.0 - a_f.dot(a_target) / (norm_a0 * norm_target);
}

Eigen::VectorXd initial_vector(const LieBasis& basis, const Eigen::VectorXd& c) {
  if (c.size() != static_cast<int>(basis.h_indices.size())) {
    throw DimensionError("expected " + std::to_string(basis.h_indices.size()) +
                         " initial-condition coefficients");
  }
  Eigen::VectorXd a = Eigen::VectorXd::Zero(basis.dimension());
  for (int i = 0; i < c.size(); ++i) a[basis.h_indices[static_cast<std::size_t>(i)]] = c[i];
  return a;
}

Eigen::VectorXd select_initial(const LieBasis& basis, const Eigen::VectorXd& a) {
  if (a.size() != basis.dimension()) throw DimensionError("vector length mismatch");
  Eigen::VectorXd c(static_cast<int>(basis.h_indices.size()));
  for (int i = 0; i < c.size(); ++i) c[i] = a[basis.h_indices[static_cast<std::size_t>(i)]];
  return c;
}

namespace {

struct SweepNorms {
  double V;
  double A;
};

SweepNorms check_cache(const SweepCache& cache, int slices, int dimension) {
  if (cache.forward.rows() != dimension || cache.backward.rows() != dimension) {
    throw ConsistencyError("sweep cache built for another basis");
  }
  if (cache.slices() != slices || cache.backward.cols() != cache.forward.cols()) {
    throw ConsistencyError("sweep cache has " + std::to_string(cache.slices()) +
                           " slices, protocol has " + std::to_string(slices));
  }
  const double V = cache.forward.col(0).norm();
  const double A = cache.backward.col(slices).norm();
  if (!(V > 0.0) || !(A > 0.0)) throw InvalidInput("zero initial or target vector");
  return {V, A};
}

// acc[k] += sum over entries of generator k < channels: lambda * left[row] * right[col].
void accumulate_bilinear(const StructureTensor& tensor, const double* left, const double* right,
                         double* acc) {
  const int channels = tensor.control_count();
  for (const auto& e : tensor.entries()) {
    if (e.generator < channels) acc[e.generator] += e.lambda * left[e.row] * right[e.col];
  }
}

// Power series of exp(-t G) v: terms[s] = (-t)^s / s! G^s v, stopped once the
// terms fall below round-off.
void series_terms(const SliceGenerator& gen, double t, const Eigen::VectorXd& v,
                  std::vector<Eigen::VectorXd>& terms) {
  terms.clear();
  terms.push_back(v);
  const double floor = 1e-17 * std::max(v.norm(), std::numeric_limits<double>::min());
  Eigen::VectorXd next(v.size());
  for (int s = 1; s < 80; ++s) {
    gen.apply(terms.back().data(), next.data());
    next *= -t / s;
    terms.push_back(next);
    if (next.norm() <= floor) break;
  }
}

}  // namespace

ControlMatrix control_gradient(const SweepCache& cache, const Protocol& protocol,
                               const StructureTensor& tensor, GradientOrder order) {
  const int slices = protocol.slices();
  if (protocol.channels() != tensor.control_count()) {
    throw LayoutError("protocol channels do not match the tensor");
  }
  const auto [V, A] = check_cache(cache, slices, tensor.dimension());
  const int d = tensor.dimension();
  const int channels = tensor.control_count();
  ControlMatrix grad = ControlMatrix::Zero(slices, channels);
  SliceGenerator gen(tensor);
  Eigen::VectorXd ga(d), gb(d), left(d), right(d);
  std::vector<Eigen::VectorXd> alpha, beta;
  KrylovExp krylov;

  for (int m = 0; m < slices; ++m) {
    gen.assign({protocol.h.data() + static_cast<std::ptrdiff_t>(m) * channels,
                static_cast<std::size_t>(channels)},
               protocol.g);
    const double tau = protocol.tau[static_cast<std::size_t>(m)];
    double* row = grad.data() + static_cast<std::ptrdiff_t>(m) * channels;

    if (order == GradientOrder::Second) {
      const auto a = cache.forward.col(m + 1);
      const auto b = cache.backward.col(m + 1);
      gen.apply(a.data(), ga.data());
      gen.apply(b.data(), gb.data());
      // b^T (Lambda + tau/2 [G, Lambda]) a, using G^T = -G.
      right = a - 0.5 * tau * ga;
      accumulate_bilinear(tensor, b.data(), right.data(), row);
      left = -0.5 * tau * gb;
      accumulate_bilinear(tensor, left.data(), a.data(), row);
      for (int k = 0; k < channels; ++k) row[k] *= tau;
    } else {
      // Integral over the slice of (e^{-uG} b)^T Lambda (e^{-uG} a), on
      // sub-intervals short enough for the series to converge cleanly.
      const int pieces =
          std::max(1, static_cast<int>(std::ceil(tau * gen.norm_bound() / 2.0)));
      const double delta = tau / pieces;
      Eigen::VectorXd a = cache.forward.col(m + 1);
      Eigen::VectorXd b = cache.backward.col(m + 1);
      for (int p = 0; p < pieces; ++p) {
        series_terms(gen, delta, a, alpha);
        series_terms(gen, delta, b, beta);
        for (std::size_t s = 0; s < alpha.size(); ++s) {
          left.setZero();
          for (std::size_t r = 0; r < beta.size(); ++r) {
            left += beta[r] / static_cast<double>(r + s + 1);
          }
          accumulate_bilinear(tensor, left.data(), alpha[s].data(), row);
        }
        if (p + 1 < pieces) {
          krylov.apply(gen, -delta, a, right, 1e-14);
          a = right;
          krylov.apply(gen, -delta, b, right, 1e-14);
          b = right;
        }
      }
      for (int k = 0; k < channels; ++k) row[k] *= delta;
    }
  }
  grad *= -1.0 / (V * A);
  return grad;
}

Eigen::VectorXd initial_gradient(const SweepCache& cache, const LieBasis& basis) {
  const auto [V, A] = check_cache(cache, cache.slices(), basis.dimension());
  const Eigen::VectorXd a0 = cache.forward.col(0);
  const Eigen::VectorXd b1 = cache.backward.col(0);
  const double F = b1.dot(a0);
  const Eigen::VectorXd c = select_initial(basis, a0);
  if ((initial_vector(basis, c) - a0).norm() > 0.0) {
    throw ConsistencyError("initial vector has support outside the Abelian subset");
  }
  return -select_initial(basis, b1) / (V * A) + F * c / (A * V * V * V);
}

double rescale_initial(const Eigen::VectorXd& a_f, const Eigen::VectorXd& a_target) {
  if (a_f.size() != a_target.size()) throw DimensionError("vector length mismatch");
  const double tt = a_target.squaredNorm();
  if (!(tt > 0.0)) throw InvalidInput("zero target vector");
  const double scale = a_f.dot(a_target) / tt;
  if (!(scale > 0.0)) {
    throw InfeasibleAlignment("propagated operator is anti-aligned with the target");
  }
  return scale;
}

// ---------------------------------------------------------------- optimizer

namespace {

using Clock = std::chrono::steady_clock;

struct MinimizeResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

using ObjectiveFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

Eigen::VectorXd clamp_box(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                          const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Projected limited-memory BFGS with Armijo backtracking along the projected
// path. Variables sitting on a bound with the gradient pushing outward are
// frozen for the direction computation.
MinimizeResult minimize_box(const ObjectiveFn& fn, Eigen::VectorXd x, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi, const OptimizeConfig& cfg, int restart) {
  x = clamp_box(x, lo, hi);
  const int nvar = static_cast<int>(x.size());
  Eigen::VectorXd g(nvar), g_new(nvar), pg(nvar), dir(nvar), x_new(nvar), q(nvar);
  double f = fn(x, g);
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> memory;
  std::vector<double> alpha_buf;
  MinimizeResult out;
  int stalls = 0;

  auto active = [&](int i) {
    return (x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0);
  };

  for (int iter = 0;; ++iter) {
    out.iterations = iter;
    if (cfg.on_iteration) cfg.on_iteration(restart, iter, f);
    for (int i = 0; i < nvar; ++i) pg[i] = active(i) ? 0.0 : g[i];
    if (f <= cfg.J_tol || pg.lpNorm<Eigen::Infinity>() <= cfg.grad_tol) {
      out.converged = true;
      break;
    }
    if (iter >= cfg.max_iter || stalls >= 10) break;

    // Two-loop recursion on the free variables.
    q = pg;
    alpha_buf.assign(memory.size(), 0.0);
    for (int j = static_cast<int>(memory.size()) - 1; j >= 0; --j) {
      const auto& [s, y] = memory[static_cast<std::size_t>(j)];
      alpha_buf[static_cast<std::size_t>(j)] = s.dot(q) / s.dot(y);
      q -= alpha_buf[static_cast<std::size_t>(j)] * y;
    }
    if (!memory.empty()) {
      const auto& [s, y] = memory.back();
      q *= s.dot(y) / y.dot(y);
    }
    for (std::size_t j = 0; j < memory.size(); ++j) {
      const auto& [s, y] = memory[j];
      const double b = y.dot(q) / s.dot(y);
      q += (alpha_buf[j] - b) * s;
    }
    dir = -q;
    for (int i = 0; i < nvar; ++i) {
      if (active(i)) dir[i] = 0.0;
    }
    if (dir.dot(pg) >= 0.0) {
      memory.clear();
      dir = -pg;
    }

    double step = memory.empty() ? std::min(1.0, 1.0 / dir.lpNorm<Eigen::Infinity>()) : 1.0;
    bool accepted = false;
    double f_new = f;
    for (int ls = 0; ls < 50; ++ls) {
      x_new = clamp_box(x + step * dir, lo, hi);
      const double slope = g.dot(x_new - x);
      if (slope >= 0.0) break;
      f_new = fn(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (memory.empty()) break;  // no descent even along the gradient
      memory.clear();
      continue;
    }

    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * std::sqrt(s.squaredNorm() * y.squaredNorm())) {
      memory.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(memory.size()) > cfg.memory) memory.pop_front();
    }
    stalls = (f - f_new <= 1e-15 * std::max(f, 1e-300)) ? stalls + 1 : 0;
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
  }
  out.x = x;
  out.f = f;
  return out;
}

struct RestartOutcome {
  Eigen::VectorXd c;
  ControlMatrix h;
  double J = 2.0;
  int iterations = 0;
  bool converged = false;
  bool feasible = false;
  double c_scale = 0.0;
};

}  // namespace

Solution optimize(const ControlSystem& system, const ControlProblem& problem,
                  const OptimizeConfig& config, const Solution* warm_start) {
  const auto start_time = Clock::now();
  const int d = system.dimension();
  const int channels = system.channels();
  const int hn = static_cast<int>(system.basis.h_indices.size());
  const double g = system.layout.g;
  if (problem.target.size() != d) throw DimensionError("target does not match the basis");
  const double A = problem.target.norm();
  if (!(A > 0.0)) throw InvalidInput("zero target vector");
  if (problem.slices < 1) throw InvalidInput("need at least one slice");
  if (!(problem.t_f > 0.0) || !std::isfinite(problem.t_f)) {
    throw InvalidInput("evolution time must be positive");
  }
  if (config.restarts < 1 || config.max_iter < 0 || config.memory < 1) {
    throw InvalidInput("restarts and memory must be positive");
  }
  const double bound = config.h_bound > 0.0 ? config.h_bound
                                            : 5.0 * (g != 0.0 ? std::abs(g) : 1.0);
  if (warm_start) {
    if (warm_start->n != system.n() || warm_start->protocol.slices() != problem.slices ||
        warm_start->protocol.channels() != channels || warm_start->c.size() != hn) {
      throw ConsistencyError("warm start does not match the problem layout");
    }
    if (!warm_start->basis_hash.empty() && warm_start->basis_hash != system.hash) {
      throw ConsistencyError("warm start was produced for a different basis");
    }
  }

  const int M = problem.slices;
  const Protocol base = Protocol::uniform(M, channels, problem.t_f, g);
  const PropagationOptions prop{ExpBackend::Krylov, config.prop_tol};
  const int nvar = M * channels + hn;
  Eigen::VectorXd lo(nvar), hi(nvar);
  lo.head(M * channels).setConstant(-bound);
  hi.head(M * channels).setConstant(bound);
  lo.tail(hn).setConstant(-std::numeric_limits<double>::infinity());
  hi.tail(hn).setConstant(std::numeric_limits<double>::infinity());

  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(config.restarts));
  auto run_restart = [&](int r) {
    Protocol protocol = base;
    auto unpack = [&](const Eigen::VectorXd& x, Eigen::VectorXd& c) {
      std::copy(x.data(), x.data() + M * channels, protocol.h.data());
      c = x.tail(hn);
    };
    auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
      Eigen::VectorXd c;
      unpack(x, c);
      const Eigen::VectorXd a0 = initial_vector(system.basis, c);
      const double V = c.norm();
      if (!(V > 0.0)) return std::numeric_limits<double>::infinity();
      SweepCache cache = forward_backward(a0, problem.target, protocol, system.tensor, prop);
      grad.resize(nvar);
      ControlMatrix gh = control_gradient(cache, protocol, system.tensor, config.gradient);
      std::copy(gh.data(), gh.data() + M * channels, grad.data());
      grad.tail(hn) = initial_gradient(cache, system.basis);
      return operator_infidelity(cache.final_state(), problem.target, V);
    };

    Eigen::VectorXd x0(nvar);
    if (r == 0 && warm_start) {
      std::copy(warm_start->protocol.h.data(), warm_start->protocol.h.data() + M * channels,
                x0.data());
      x0.tail(hn) = warm_start->c;
    } else {
      std::mt19937_64 rng(substream_seed(config.seed, static_cast<std::uint64_t>(r)));
      std::uniform_real_distribution<double> uni(-bound, bound);
      std::normal_distribution<double> normal;
      for (int i = 0; i < M * channels; ++i) x0[i] = uni(rng);
      Eigen::VectorXd c(hn);
      for (int i = 0; i < hn; ++i) c[i] = normal(rng);
      c *= A / c.norm();
      std::copy(x0.data(), x0.data() + M * channels, protocol.h.data());
      // Orient c so the starting overlap with the target is non-negative.
      const Eigen::VectorXd a_f =
          propagate(initial_vector(system.basis, c), protocol, system.tensor, prop);
      if (a_f.dot(problem.target) < 0.0) c = -c;
      x0.tail(hn) = c;
    }

    MinimizeResult res = minimize_box(objective, x0, lo, hi, config, r);
    RestartOutcome& out = outcomes[static_cast<std::size_t>(r)];
    unpack(res.x, out.c);
    out.h = protocol.h;
    out.J = res.f;
    out.iterations = res.iterations;
    out.converged = res.converged;
    const Eigen::VectorXd a_f =
        propagate(initial_vector(system.basis, out.c), protocol, system.tensor, prop);
    const double F = a_f.dot(problem.target);
    out.feasible = F > 0.0 && std::isfinite(res.f);
    out.c_scale = F / (A * A);
    out.J = operator_infidelity(a_f, problem.target, out.c.norm());
  };

  parallel_for(config.restarts, worker_count(config.threads), run_restart);

  int best = -1;
  for (int r = 0; r < config.restarts; ++r) {
    const auto& o = outcomes[static_cast<std::size_t>(r)];
    if (!o.feasible) continue;
    if (best < 0 || o.J < outcomes[static_cast<std::size_t>(best)].J) best = r;
  }
  if (best < 0) {
    throw InfeasibleAlignment("every restart ended anti-aligned with the target");
  }
  const auto& o = outcomes[static_cast<std::size_t>(best)];
  Solution sol;
  sol.n = system.n();
  sol.g = g;
  sol.basis_hash = system.hash;
  sol.c_scale = o.c_scale;
  sol.c = o.c / o.c_scale;
  sol.protocol = base;
  sol.protocol.h = o.h;
  sol.J = o.J;
  sol.seed = config.seed;
  sol.converged = o.J <= config.J_tol;
  sol.iterations = o.iterations;
  sol.restart = best;
  sol.restarts_used = config.restarts;
  sol.wall_seconds = std::chrono::duration<double>(Clock::now() - start_time).count();
  return sol;
}

double evaluate_solution(const ControlSystem& system, const Solution& solution,
                         const Eigen::VectorXd& target, double prop_tol) {
  const Eigen::VectorXd a0 = initial_vector(system.basis, solution.c);
  const Eigen::VectorXd a_f =
      propagate(a0, solution.protocol, system.tensor, {ExpBackend::Krylov, prop_tol});
  return operator_infidelity(a_f, target, a0.norm());
}

ContinuationResult continuation(const ControlSystem& system, const Solution& previous,
                                const Eigen::VectorXd& from, const Eigen::VectorXd& to,
                                int steps, const OptimizeConfig& config) {
  if (steps < 1) throw InvalidInput("continuation needs at least one step");
  if (from.size() != system.dimension() || to.size() != system.dimension()) {
    throw DimensionError("continuation targets do not match the basis");
  }
  ContinuationResult result;
  result.solution = previous;
  OptimizeConfig stage_config = config;
  stage_config.restarts = 1;
  for (int s = 1; s <= steps; ++s) {
    const double w = static_cast<double>(s) / steps;
    ControlProblem stage{(1.0 - w) * from + w * to, previous.protocol.total_time(),
                         previous.protocol.slices()};
    Solution next = optimize(system, stage, stage_config, &result.solution);
    next.lambdas = previous.lambdas;
    next.lambda_scale = previous.lambda_scale;
    result.stage_J.push_back(next.J);
    if (!next.converged) return result;
    result.solution = std::move(next);
    result.stage = s;
  }
  result.completed = true;
  return result;
}

void detect_drop(ScanResult& result, double threshold) {
  result.t_min.reset();
  result.drop_ratio = 0.0;
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    if (result.points[i].best_J < threshold) {
      result.t_min = result.points[i].t_f;
      if (i > 0) {
        result.drop_ratio = result.points[i - 1].best_J /
                            std::max(result.points[i].best_J, 1e-300);
      }
      return;
    }
  }
}

ScanResult qsl_scan(const ControlSystem& system, const Eigen::VectorXd& target,
                    const std::vector<double>& t_grid, const ScanConfig& config,
                    const std::function<void(const ScanPoint&)>& progress) {
  if (!std::is_sorted(t_grid.begin(), t_grid.end()) ||
      std::adjacent_find(t_grid.begin(), t_grid.end()) != t_grid.end()) {
    throw InvalidInput("the time grid must be strictly increasing");
  }
  if (config.discretization < 1) throw InvalidInput("discretization factor must be positive");
  ScanResult result;
  for (double t_f : t_grid) {
    ControlProblem problem{target, t_f, config.discretization * system.n()};
    Solution sol = optimize(system, problem, config.optimize);
    ScanPoint point{t_f, sol.J, sol.restarts_used};
    result.points.push_back(point);
    if (progress) progress(point);
  }
  detect_drop(result, config.drop_threshold);
  return result;
}

}  // namespace liethermal
