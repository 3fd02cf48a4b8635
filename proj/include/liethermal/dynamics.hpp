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

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "liethermal/pauli_algebra.hpp"

namespace liethermal {

using ControlMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/**
 * Piecewise-constant control protocol.
 *
 * Row m of `h` holds the channel amplitudes of slice m; slice m lasts tau[m].
 * The drift couplings run at the constant amplitude g throughout.
 */
struct Protocol {
  std::vector<double> tau;
  ControlMatrix h;
  double g = 1.0;

  int slices() const { return static_cast<int>(tau.size()); }
  int channels() const { return static_cast<int>(h.cols()); }
  double total_time() const;

  /// All-zero amplitudes on `slices` equal slices of total duration t_f.
  static Protocol uniform(int slices, int channels, double t_f, double g);

  /// Throws on non-positive durations or non-finite amplitudes; also on
  /// |h| > bound when bound is positive.
  void validate(double bound = 0.0) const;

  /// Reversed slice order with negated amplitudes and coupling; undoes *this.
  Protocol reversed() const;
};

/// Concatenates two protocols sharing g and the channel count.
Protocol concatenate(const Protocol& first, const Protocol& second);

/**
 * The real antisymmetric generator G of one slice, stored on the structure
 * tensor's fixed sparsity pattern.
 */
class SliceGenerator {
 public:
  SliceGenerator() = default;
  explicit SliceGenerator(const StructureTensor& tensor);

  /// Re-weights the pattern for new amplitudes without reallocating.
  void assign(std::span<const double> controls, double g);

  int dimension() const { return tensor_ ? tensor_->dimension() : 0; }
  const StructureTensor& tensor() const { return *tensor_; }
  std::span<const double> values() const { return values_; }

  /// y = G x.
  void apply(const double* x, double* y) const;
  /// Column-sum bound on the 1-norm of G.
  double norm_bound() const { return norm_bound_; }

  Eigen::SparseMatrix<double> to_sparse() const;

 private:
  const StructureTensor* tensor_ = nullptr;
  std::vector<double> values_;
  double norm_bound_ = 0.0;
};

SliceGenerator assemble_generator(std::span<const double> controls, double g,
                                  const StructureTensor& tensor);

enum class ExpBackend { Krylov, Dense };

struct PropagationOptions {
  ExpBackend backend = ExpBackend::Krylov;
  double tol = 1e-12;
};

/// Largest dimension accepted by the dense exponential backend.
inline constexpr int kDenseExpMaxDimension = 400;

/**
 * Krylov evaluation of exp(t G) v for antisymmetric G.
 *
 * The Lanczos recurrence of a skew-symmetric operator is three-term with a
 * zero diagonal; the basis is kept fully orthogonal. Steps whose error
 * estimate misses `tol` are split into shorter sub-steps. The workspace
 * keeps its buffers between calls.
 */
class KrylovExp {
 public:
  explicit KrylovExp(int max_subspace = 40);

  void apply(const SliceGenerator& g, double t, const Eigen::Ref<const Eigen::VectorXd>& v,
             Eigen::Ref<Eigen::VectorXd> out, double tol);

  /// Lanczos iterations spent by the last apply() (diagnostics).
  int last_iterations() const { return last_iterations_; }

 private:
  bool project(const SliceGenerator& g, const Eigen::VectorXd& start, int limit);
  void small_exp(int m, double t, Eigen::VectorXd& y) const;

  int max_subspace_;
  Eigen::MatrixXd basis_;        // d x (m + 1)
  std::vector<double> beta_;     // beta_[i] couples basis i and i + 1
  int built_ = 0;
  bool invariant_ = false;
  int last_iterations_ = 0;
  Eigen::VectorXd work_;
};

/// exp(t G) v within relative error `tol`.
Eigen::VectorXd exp_action(const SliceGenerator& g, double t,
                           const Eigen::VectorXd& v, double tol = 1e-12,
                           ExpBackend backend = ExpBackend::Krylov);

/// Propagates a0 slice by slice. When `trajectory` is given it receives the
/// d x (M + 1) matrix of states after each slice (column 0 is a0).
Eigen::VectorXd propagate(const Eigen::VectorXd& a0, const Protocol& protocol,
                          const StructureTensor& tensor,
                          const PropagationOptions& options = {},
                          Eigen::MatrixXd* trajectory = nullptr);

/**
 * Forward and backward sweeps of one protocol.
 *
 * Column m of `forward` is a_m = U_m...U_1 a(0) for m = 0..M. Column m of
 * `backward` is b_{m+1} with b_{m+1}^T = a_T^T U_M...U_{m+1}, so column M is
 * a_T itself and b_{m+1} . a_m is the same for every m.
 */
struct SweepCache {
  Eigen::MatrixXd forward;
  Eigen::MatrixXd backward;

  int slices() const { return static_cast<int>(forward.cols()) - 1; }
  Eigen::VectorXd final_state() const { return forward.col(forward.cols() - 1); }
};

SweepCache forward_backward(const Eigen::VectorXd& a0, const Eigen::VectorXd& a_target,
                            const Protocol& protocol, const StructureTensor& tensor,
                            const PropagationOptions& options = {});

}  // namespace liethermal
