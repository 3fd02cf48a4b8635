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

#include <vector>

#include <Eigen/Dense>

#include "liethermal/circuit_builder.hpp"
#include "liethermal/control.hpp"
#include "liethermal/dynamics.hpp"
#include "liethermal/pauli_algebra.hpp"

namespace liethermal {

/// Dense operators act on 2^n amplitudes with site 1 as the most significant
/// bit of the index; |0> carries Z = +1.
using DenseOperator = Eigen::MatrixXcd;

inline constexpr int kDenseSiteCap = 12;
inline constexpr int kDensePropagationCap = 5;
inline constexpr int kCircuitQubitCap = 13;

DenseOperator dense_pauli(const PauliString& p);

/// sum_j a_j b_j.
DenseOperator realize_dense(const Eigen::VectorXd& a, const LieBasis& basis);

/// a_j = Re tr(b_j K) / 2^n.
Eigen::VectorXd project_dense(const DenseOperator& K, const LieBasis& basis);

/// Eigendecomposition of a Hermitian operator, reused across temperatures.
class ThermalSpectrum {
 public:
  explicit ThermalSpectrum(const DenseOperator& K);

  /// exp(-beta K) / tr, built with the spectrum shifted by its minimum.
  Eigen::MatrixXcd state(double beta) const;
  const Eigen::VectorXd& energies() const { return energies_; }
  const Eigen::MatrixXcd& vectors() const { return vectors_; }

 private:
  Eigen::VectorXd energies_;
  Eigen::MatrixXcd vectors_;
};

Eigen::MatrixXcd thermal_state(const DenseOperator& K, double beta);

/// 1 - tr(rho sigma) / sqrt(tr rho^2 tr sigma^2).
double state_infidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);

struct GroundStateBound {
  double bound = 0.0;       // (<Psi|K_T|Psi> - E0) / (E1 - E0)
  double infidelity = 0.0;  // 1 - |<Psi|phi0>|^2
  double e0 = 0.0;
  double e1 = 0.0;
};

/// Ground-state bound of the propagated operator a_f against K_T. `gap_floor`
/// is relative to the largest |eigenvalue| of K_T.
GroundStateBound ground_state_bound(const Eigen::VectorXd& a_f, const Eigen::VectorXd& a_target,
                                    const LieBasis& basis, double gap_floor = 1e-10);

/// U(t_f) from dense exponentials of the Hamiltonian of each slice.
Eigen::MatrixXcd dense_propagator(const Protocol& protocol, const ControlLayout& layout);

/// max |a_dense - a_ode| after conjugating K0 = P c by the dense propagator.
double dense_propagate_check(const Eigen::VectorXd& c, const Protocol& protocol,
                             const ControlSystem& system);

struct CircuitSimulation {
  Eigen::MatrixXcd reduced;  // system register after postselection
  double success_probability = 0.0;
};

/// Statevector run from |0...0>, copies traced out, parity qubit projected.
CircuitSimulation simulate_circuit(const PreparationCircuit& circuit);

/// Diagonal operator K0 = P c.
DenseOperator initial_operator(const Eigen::VectorXd& c, const LieBasis& basis);

}  // namespace liethermal
