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

#include "liethermal/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "liethermal/errors.hpp"

namespace liethermal {

// ---------------------------------------------------------------- Protocol

double Protocol::total_time() const {
  return std::accumulate(tau.begin(), tau.end(), 0.0);
}

Protocol Protocol::uniform(int slices, int channels, double t_f, double g) {
  if (slices < 0 || channels < 0) throw InvalidInput("negative protocol size");
  Protocol p;
  p.tau.assign(static_cast<std::size_t>(slices), slices > 0 ? t_f / slices : 0.0);
  p.h = ControlMatrix::Zero(slices, channels);
  p.g = g;
  return p;
}

void Protocol::validate(double bound) const {
  if (static_cast<int>(h.rows()) != slices()) {
    throw LayoutError("amplitude rows do not match the slice count");
  }
  for (double t : tau) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw InvalidInput("slice durations must be positive and finite");
    }
  }
  if (!std::isfinite(g)) throw NumericError("coupling g is not finite");
  if (!h.allFinite()) throw NumericError("control amplitudes are not finite");
  if (bound > 0.0 && h.size() > 0 && h.cwiseAbs().maxCoeff() > bound) {
    throw InvalidInput("control amplitude exceeds the bound " + std::to_string(bound));
  }
}

Protocol Protocol::reversed() const {
  Protocol r;
  r.tau.assign(tau.rbegin(), tau.rend());
  r.h = -h.colwise().reverse();
  r.g = -g;
  return r;
}

Protocol concatenate(const Protocol& first, const Protocol& second) {
  if (first.channels() != second.channels() || first.g != second.g) {
    throw LayoutError("protocols differ in channels or coupling");
  }
  Protocol p;
  p.tau = first.tau;
  p.tau.insert(p.tau.end(), second.tau.begin(), second.tau.end());
  p.h.resize(first.slices() + second.slices(), first.channels());
  if (first.slices() > 0) p.h.topRows(first.slices()) = first.h;
  if (second.slices() > 0) p.h.bottomRows(second.slices()) = second.h;
  p.g = first.g;
  return p;
}

// ---------------------------------------------------------- SliceGenerator

SliceGenerator::SliceGenerator(const StructureTensor& tensor)
    : tensor_(&tensor), values_(tensor.entries().size(), 0.0) {}

void SliceGenerator::assign(std::span<const double> controls, double g) {
  if (static_cast<int>(controls.size()) != tensor_->control_count()) {
    throw LayoutError("expected " + std::to_string(tensor_->control_count()) +
                      " control amplitudes, got " + std::to_string(controls.size()));
  }
  const int channels = tensor_->control_count();
  const auto& entries = tensor_->entries();
  std::vector<double> column_sum(static_cast<std::size_t>(tensor_->dimension()), 0.0);
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const int k = entries[e].generator;
    const double amp = k < channels ? controls[static_cast<std::size_t>(k)] : g;
    values_[e] = amp * entries[e].lambda;
    column_sum[static_cast<std::size_t>(entries[e].col)] += std::abs(values_[e]);
  }
  norm_bound_ = column_sum.empty() ? 0.0
                                   : *std::max_element(column_sum.begin(), column_sum.end());
}

void SliceGenerator::apply(const double* x, double* y) const {
  const auto& entries = tensor_->entries();
  const auto& start = tensor_->row_start();
  const int d = tensor_->dimension();
  for (int r = 0; r < d; ++r) {
    double acc = 0.0;
    for (int e = start[r]; e < start[r + 1]; ++e) {
      acc += values_[static_cast<std::size_t>(e)] * x[entries[static_cast<std::size_t>(e)].col];
    }
    y[r] = acc;
  }
}

Eigen::SparseMatrix<double> SliceGenerator::to_sparse() const {
  std::vector<Eigen::Triplet<double>> triplets;
  const auto& entries = tensor_->entries();
  triplets.reserve(entries.size());
  for (std::size_t e = 0; e < entries.size(); ++e) {
    if (values_[e] != 0.0) triplets.emplace_back(entries[e].row, entries[e].col, values_[e]);
  }
  Eigen::SparseMatrix<double> m(dimension(), dimension());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

SliceGenerator assemble_generator(std::span<const double> controls, double g,
                                  const StructureTensor& tensor) {
  SliceGenerator gen(tensor);
  gen.assign(controls, g);
  return gen;
}

// --------------------------------------------------------------- KrylovExp

KrylovExp::KrylovExp(int max_subspace) : max_subspace_(std::max(2, max_subspace)) {}

void KrylovExp::small_exp(int m, double t, Eigen::VectorXd& y) const {
  // exp(t T) e_1 for the m x m skew tridiagonal T with T[i+1][i] = beta_i.
  y = Eigen::VectorXd::Zero(m);
  y[0] = 1.0;
  if (m == 1 || t == 0.0) return;
  double bound = 0.0;
  for (int i = 0; i + 1 < m; ++i) {
    const double left = i > 0 ? std::abs(beta_[static_cast<std::size_t>(i - 1)]) : 0.0;
    bound = std::max(bound, left + std::abs(beta_[static_cast<std::size_t>(i)]));
  }
  const int substeps = std::max(1, static_cast<int>(std::ceil(std::abs(t) * bound / 0.5)));
  const double h = t / substeps;
  Eigen::VectorXd term(m), next(m);
  for (int s = 0; s < substeps; ++s) {
    term = y;
    for (int k = 1; k < 60; ++k) {
      for (int i = 0; i < m; ++i) {
        double v = 0.0;
        if (i > 0) v += beta_[static_cast<std::size_t>(i - 1)] * term[i - 1];
        if (i + 1 < m) v -= beta_[static_cast<std::size_t>(i)] * term[i + 1];
        next[i] = v * h / k;
      }
      term.swap(next);
      y += term;
      if (term.lpNorm<Eigen::Infinity>() < 1e-18 * y.lpNorm<Eigen::Infinity>()) break;
    }
  }
}

bool KrylovExp::project(const SliceGenerator& g, const Eigen::VectorXd& start,
                        int limit) {
  // Extends the basis from `built_` vectors up to `limit`; returns false on an
  // invariant subspace.
  const int d = g.dimension();
  if (built_ == 0) {
    basis_.col(0) = start;
    built_ = 1;
    beta_.clear();
  }
  while (built_ < limit + 1 && !invariant_) {
    const int j = built_ - 1;
    g.apply(basis_.col(j).data(), work_.data());
    if (j > 0) work_ += beta_[static_cast<std::size_t>(j - 1)] * basis_.col(j - 1);
    const double before = work_.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        work_ -= basis_.col(i).dot(work_) * basis_.col(i);
      }
      if (work_.norm() > 0.7 * before) break;
    }
    const double b = work_.norm();
    beta_.push_back(b);
    ++last_iterations_;
    if (b <= 1e-14 * std::max(1.0, g.norm_bound()) || built_ == d) {
      invariant_ = true;
      return false;
    }
    basis_.col(built_) = work_ / b;
    ++built_;
  }
  return !invariant_;
}

void KrylovExp::apply(const SliceGenerator& g, double t,
                      const Eigen::Ref<const Eigen::VectorXd>& v,
                      Eigen::Ref<Eigen::VectorXd> out, double tol) {
  const int d = g.dimension();
  if (v.size() != d || out.size() != d) throw DimensionError("vector length mismatch");
  if (!std::isfinite(t) || !v.allFinite()) throw NumericError("non-finite exp_action input");
  if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive");
  last_iterations_ = 0;

  Eigen::VectorXd w = v;
  const double norm = w.norm();
  if (norm == 0.0 || t == 0.0 || g.norm_bound() == 0.0) {
    out = w;
    return;
  }
  const int m_max = std::min(max_subspace_, d);
  if (basis_.rows() != d || basis_.cols() < m_max + 1) basis_.resize(d, m_max + 1);
  work_.resize(d);

  double remaining = t;
  double step = t;
  Eigen::VectorXd y;
  while (remaining != 0.0) {
    if (std::abs(step) > std::abs(remaining)) step = remaining;
    const double wn = w.norm();
    built_ = 0;
    invariant_ = false;
    int m = 0;
    bool accepted = false;
    Eigen::VectorXd start = w / wn;
    for (int target = 1; target <= m_max; ++target) {
      const bool open = project(g, start, target);
      m = open ? built_ - 1 : built_;
      small_exp(m, step, y);
      if (!open) {
        accepted = true;  // invariant subspace: the projection is exact
        break;
      }
      const double err = beta_[static_cast<std::size_t>(m - 1)] * std::abs(y[m - 1]);
      if (err <= tol) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Same subspace, shorter step until the estimate passes.
      for (int halvings = 0; halvings < 60; ++halvings) {
        step *= 0.5;
        small_exp(m, step, y);
        const double err = beta_[static_cast<std::size_t>(m - 1)] * std::abs(y[m - 1]);
        if (err <= tol) {
          accepted = true;
          break;
        }
      }
      if (!accepted) throw NumericError("Krylov exponential did not converge");
    }
    w = wn * (basis_.leftCols(m) * y);
    remaining -= step;
    if (std::abs(remaining) <= 1e-15 * std::abs(t)) remaining = 0.0;
  }
  out = w;
}

Eigen::VectorXd exp_action(const SliceGenerator& g, double t, const Eigen::VectorXd& v,
                           double tol, ExpBackend backend) {
  if (backend == ExpBackend::Dense) {
    const int d = g.dimension();
    if (d > kDenseExpMaxDimension) {
      throw SizeError("dense exponential limited to d <= " +
                      std::to_string(kDenseExpMaxDimension));
    }
    if (v.size() != d) throw DimensionError("vector length mismatch");
    if (!std::isfinite(t) || !v.allFinite()) throw NumericError("non-finite exp_action input");
    const Eigen::MatrixXd dense = Eigen::MatrixXd(g.to_sparse()) * t;
    return dense.exp() * v;
  }
  KrylovExp krylov;
  Eigen::VectorXd out(v.size());
  krylov.apply(g, t, v, out, tol);
  return out;
}

// ------------------------------------------------------------- propagation

namespace {

void check_protocol(const Protocol& protocol, const StructureTensor& tensor) {
  if (protocol.channels() != tensor.control_count()) {
    throw LayoutError("protocol has " + std::to_string(protocol.channels()) +
                      " channels, tensor expects " + std::to_string(tensor.control_count()));
  }
  if (static_cast<int>(protocol.h.rows()) != protocol.slices()) {
    throw LayoutError("amplitude rows do not match the slice count");
  }
}

std::span<const double> slice_controls(const Protocol& p, int m) {
  return {p.h.data() + static_cast<std::ptrdiff_t>(m) * p.h.cols(),
          static_cast<std::size_t>(p.h.cols())};
}

class Stepper {
 public:
  Stepper(const StructureTensor& tensor, const PropagationOptions& options)
      : gen_(tensor), options_(options) {}

  void step(const Protocol& p, int m, double sign, const Eigen::Ref<const Eigen::VectorXd>& in,
            Eigen::Ref<Eigen::VectorXd> out) {
    gen_.assign(slice_controls(p, m), p.g);
    const double t = sign * p.tau[static_cast<std::size_t>(m)];
    if (options_.backend == ExpBackend::Dense) {
      out = exp_action(gen_, t, in, options_.tol, ExpBackend::Dense);
    } else {
      krylov_.apply(gen_, t, in, out, options_.tol);
    }
  }

 private:
  SliceGenerator gen_;
  KrylovExp krylov_;
  PropagationOptions options_;
};

}  // namespace

Eigen::VectorXd propagate(const Eigen::VectorXd& a0, const Protocol& protocol,
                          const StructureTensor& tensor, const PropagationOptions& options,
                          Eigen::MatrixXd* trajectory) {
  check_protocol(protocol, tensor);
  if (a0.size() != tensor.dimension()) throw DimensionError("initial vector length mismatch");
  const int slices = protocol.slices();
  Stepper stepper(tensor, options);
  if (trajectory) {
    trajectory->resize(tensor.dimension(), slices + 1);
    trajectory->col(0) = a0;
  }
  Eigen::VectorXd current = a0;
  Eigen::VectorXd next(a0.size());
  for (int m = 0; m < slices; ++m) {
    stepper.step(protocol, m, 1.0, current, next);
    current.swap(next);
    if (trajectory) trajectory->col(m + 1) = current;
  }
  return current;
}

SweepCache forward_backward(const Eigen::VectorXd& a0, const Eigen::VectorXd& a_target,
                            const Protocol& protocol, const StructureTensor& tensor,
                            const PropagationOptions& options) {
  check_protocol(protocol, tensor);
  const int d = tensor.dimension();
  if (a0.size() != d || a_target.size() != d) {
    throw DimensionError("sweep vectors do not match the basis dimension");
  }
  const int slices = protocol.slices();
  SweepCache cache;
  cache.forward.resize(d, slices + 1);
  cache.backward.resize(d, slices + 1);
  Stepper stepper(tensor, options);

  cache.forward.col(0) = a0;
  for (int m = 0; m < slices; ++m) {
    stepper.step(protocol, m, 1.0, cache.forward.col(m), cache.forward.col(m + 1));
  }
  // U_m^T = exp(-tau_m G_m) because G_m is antisymmetric.
  cache.backward.col(slices) = a_target;
  for (int m = slices - 1; m >= 0; --m) {
    stepper.step(protocol, m, -1.0, cache.backward.col(m + 1), cache.backward.col(m));
  }
  return cache;
}

}  // namespace liethermal
