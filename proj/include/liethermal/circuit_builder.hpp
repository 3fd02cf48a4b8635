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

#include <string>
#include <vector>

#include <Eigen/Core>

namespace liethermal {

/// One gate of a preparation circuit. "ry" applies exp(-i angle Y) to its
/// qubit; "cx" is a CNOT with qubits {control, target}.
struct Gate {
  std::string name;
  std::vector<int> qubits;
  double angle = 0.0;
};

/**
 * Circuit preparing exp(-beta K0) / Z on the system register.
 *
 * Qubits 0..n-1 are the system sites S_1..S_n, qubits n..2n-1 the copies
 * A_1..A_n and qubit 2n the parity qubit. After the gates, the parity qubit
 * is measured and the run is kept when it reads `accepted_outcome`.
 */
struct PreparationCircuit {
  int n = 0;
  double beta = 0.0;
  std::vector<Gate> gates;
  std::vector<double> site_angles;  // theta_j, j = 1..n
  double parity_angle = 0.0;        // phi with tan(phi) = exp(beta c0)
  int parity_qubit = 0;
  int accepted_outcome = 0;
  double success_probability = 0.5;

  int qubit_count() const { return 2 * n + 1; }
  int rotation_count() const;
  int cnot_count() const;
};

PreparationCircuit build_circuit(const Eigen::VectorXd& c, double beta);

/// Probability that the parity qubit reads the accepted outcome:
/// (1 - (-1)^n prod_i tanh(beta c_i)) / 2.
double success_probability(const Eigen::VectorXd& c, double beta);

/// Plain-text gate listing, one instruction per line.
std::string circuit_text(const PreparationCircuit& circuit);

}  // namespace liethermal
