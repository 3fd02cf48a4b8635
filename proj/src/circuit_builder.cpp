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

#include "liethermal/circuit_builder.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "liethermal/errors.hpp"
#include "liethermal/thermal_sampling.hpp"

namespace liethermal {

int PreparationCircuit::rotation_count() const {
  int count = 0;
  for (const auto& g : gates) count += g.name == "ry";
  return count;
}

int PreparationCircuit::cnot_count() const {
  int count = 0;
  for (const auto& g : gates) count += g.name == "cx";
  return count;
}

double success_probability(const Eigen::VectorXd& c, double beta) {
  return chain_tables(c, beta).normalization;
}

PreparationCircuit build_circuit(const Eigen::VectorXd& c, double beta) {
  const ChainTables t = chain_tables(c, beta);
  PreparationCircuit circ;
  circ.n = t.n;
  circ.beta = beta;
  circ.parity_qubit = 2 * t.n;
  circ.success_probability = t.normalization;

  // cos(theta) = sqrt((1 - m) / 2): amplitude of |0>, i.e. of z = +1.
  for (int j = 1; j <= t.n; ++j) {
    const double x = t.x[static_cast<std::size_t>(j)];
    const double theta = std::atan2(std::sqrt(site_weight(x, -1)), std::sqrt(site_weight(x, 1)));
    circ.site_angles.push_back(theta);
    circ.gates.push_back({"ry", {j - 1}, theta});
  }
  for (int j = 0; j < t.n; ++j) circ.gates.push_back({"cx", {j, t.n + j}, 0.0});
  for (int j = 0; j < t.n; ++j) circ.gates.push_back({"cx", {j, circ.parity_qubit}, 0.0});
  // exp(i phi Y) maps <0| onto (cos phi, sin phi) over the parity bit.
  circ.parity_angle = std::atan(std::exp(t.x[0]));
  circ.gates.push_back({"ry", {circ.parity_qubit}, -circ.parity_angle});
  return circ;
}

std::string circuit_text(const PreparationCircuit& circuit) {
  std::ostringstream out;
  char buf[64];
  out << "# thermal preparation circuit\n";
  out << "# ry(a) q = exp(-i a Y) on q; cx c,t = CNOT\n";
  out << "# qubits 0.." << circuit.n - 1 << " system, " << circuit.n << ".."
      << 2 * circuit.n - 1 << " copies, " << circuit.parity_qubit << " parity\n";
  std::snprintf(buf, sizeof buf, "%.17g", circuit.beta);
  out << "# beta " << buf << "\n";
  out << "qubits " << circuit.qubit_count() << "\n";
  for (const auto& g : circuit.gates) {
    if (g.name == "ry") {
      std::snprintf(buf, sizeof buf, "%.17g", g.angle);
      out << "ry(" << buf << ") q[" << g.qubits[0] << "]\n";
    } else {
      out << "cx q[" << g.qubits[0] << "], q[" << g.qubits[1] << "]\n";
    }
  }
  std::snprintf(buf, sizeof buf, "%.17g", circuit.success_probability);
  out << "measure q[" << circuit.parity_qubit << "] postselect " << circuit.accepted_outcome
      << "  # P_s = " << buf << "\n";
  return out.str();
}

}  // namespace liethermal
