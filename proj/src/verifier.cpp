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

#include "liethermal/verifier.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Eigenvalues>

#include "liethermal/errors.hpp"

namespace liethermal {

namespace {

using cd = std::complex<double>;

void check_sites(int n, int cap, const char* what) {
  if (n > cap) {
    throw SizeError(std::string(what) + " is limited to n <= " + std::to_string(cap) +
                    ", got " + std::to_string(n));
  }
}

// Mask bit s - 1 (site s) becomes index bit n - s.
std::uint64_t index_mask(std::uint64_t mask, int n) {
  std::uint64_t out = 0;
  for (int s = 1; s <= n; ++s) {
    if (mask >> (s - 1) & 1U) out |= std::uint64_t{1} << (n - s);
  }
  return out;
}

struct IndexAction {
  std::uint64_t flip;
  std::uint64_t phase_mask;
  cd unit;  // i^{y count}
};

IndexAction index_action(const PauliString& p) {
  static const cd kPowers[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
  return {index_mask(p.x_mask, p.n), index_mask(p.z_mask, p.n), kPowers[p.y_count() % 4]};
}

// Value of column s of the Pauli matrix (its only nonzero sits in row s ^ flip).
cd column_value(const IndexAction& act, std::uint64_t s) {
  return std::popcount(act.phase_mask & s) % 2 ? -act.unit : act.unit;
}

}  // namespace

DenseOperator dense_pauli(const PauliString& p) {
  check_sites(p.n, kDenseSiteCap, "dense realization");
  const std::uint64_t dim = std::uint64_t{1} << p.n;
  DenseOperator m = DenseOperator::Zero(static_cast<Eigen::Index>(dim),
                                        static_cast<Eigen::Index>(dim));
  const auto act = index_action(p);
  for (std::uint64_t s = 0; s < dim; ++s) {
    m(static_cast<Eigen::Index>(s ^ act.flip), static_cast<Eigen::Index>(s)) =
        column_value(act, s);
  }
  return m;
}

DenseOperator realize_dense(const Eigen::VectorXd& a, const LieBasis& basis) {
  check_sites(basis.n, kDenseSiteCap, "dense realization");
  if (a.size() != basis.dimension()) throw DimensionError("coefficient length mismatch");
  const std::uint64_t dim = std::uint64_t{1} << basis.n;
  DenseOperator k = DenseOperator::Zero(static_cast<Eigen::Index>(dim),
                                        static_cast<Eigen::Index>(dim));
  for (int j = 0; j < a.size(); ++j) {
    if (a[j] == 0.0) continue;
    const auto act = index_action(basis.elements[static_cast<std::size_t>(j)]);
    for (std::uint64_t s = 0; s < dim; ++s) {
      k(static_cast<Eigen::Index>(s ^ act.flip), static_cast<Eigen::Index>(s)) +=
          a[j] * column_value(act, s);
    }
  }
  return k;
}

Eigen::VectorXd project_dense(const DenseOperator& K, const LieBasis& basis) {
  const std::uint64_t dim = std::uint64_t{1} << basis.n;
  if (K.rows() != static_cast<Eigen::Index>(dim) || K.cols() != K.rows()) {
    throw DimensionError("operator does not act on the basis' Hilbert space");
  }
  Eigen::VectorXd a(basis.dimension());
  for (int j = 0; j < basis.dimension(); ++j) {
    const auto act = index_action(basis.elements[static_cast<std::size_t>(j)]);
    cd tr = 0.0;
    for (std::uint64_t s = 0; s < dim; ++s) {
      tr += column_value(act, s) *
            K(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s ^ act.flip));
    }
    a[j] = tr.real() / static_cast<double>(dim);
  }
  return a;
}

DenseOperator initial_operator(const Eigen::VectorXd& c, const LieBasis& basis) {
  return realize_dense(initial_vector(basis, c), basis);
}

ThermalSpectrum::ThermalSpectrum(const DenseOperator& K) {
  if (K.rows() != K.cols()) throw DimensionError("operator is not square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(K);
  if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  energies_ = eig.eigenvalues();
  vectors_ = eig.eigenvectors();
}

Eigen::MatrixXcd ThermalSpectrum::state(double beta) const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidInput("beta must be >= 0");
  const double e0 = energies_.minCoeff();
  Eigen::VectorXd w = (-beta * (energies_.array() - e0)).exp();
  w /= w.sum();
  return vectors_ * w.cast<cd>().asDiagonal() * vectors_.adjoint();
}

Eigen::MatrixXcd thermal_state(const DenseOperator& K, double beta) {
  return ThermalSpectrum(K).state(beta);
}

double state_infidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw DimensionError("density matrices differ in dimension");
  }
  const double overlap = rho.cwiseProduct(sigma.transpose()).sum().real();
  const double rr = rho.cwiseProduct(rho.transpose()).sum().real();
  const double ss = sigma.cwiseProduct(sigma.transpose()).sum().real();
  if (!(rr > 0.0) || !(ss > 0.0)) throw InvalidInput("zero density matrix");
  return 1.0 - overlap / std::sqrt(rr * ss);
}

GroundStateBound ground_state_bound(const Eigen::VectorXd& a_f, const Eigen::VectorXd& a_target,
                                    const LieBasis& basis, double gap_floor) {
  const DenseOperator kt = realize_dense(a_target, basis);
  const DenseOperator kf = realize_dense(a_f, basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> target(kt), prepared(kf);
  if (target.info() != Eigen::Success || prepared.info() != Eigen::Success) {
    throw NumericError("eigendecomposition failed");
  }
  GroundStateBound out;
  const auto& e = target.eigenvalues();
  out.e0 = e[0];
  out.e1 = e[1];
  const double scale = std::max(std::abs(e[0]), std::abs(e[e.size() - 1]));
  if (!(out.e1 - out.e0 > gap_floor * scale)) {
    throw DegenerateGap("target gap " + std::to_string(out.e1 - out.e0) +
                        " is below the numerical floor");
  }
  const Eigen::VectorXcd psi = prepared.eigenvectors().col(0);
  const double energy = psi.dot(kt * psi).real();
  out.bound = (energy - out.e0) / (out.e1 - out.e0);
  out.infidelity = 1.0 - std::norm(target.eigenvectors().col(0).dot(psi));
  return out;
}

Eigen::MatrixXcd dense_propagator(const Protocol& protocol, const ControlLayout& layout) {
  check_sites(layout.n, kDenseSiteCap, "dense propagation");
  if (protocol.channels() != layout.channel_count()) {
    throw LayoutError("protocol channels do not match the layout");
  }
  std::vector<DenseOperator> controls, drift;
  for (const auto& p : layout.controls) controls.push_back(dense_pauli(p));
  DenseOperator drift_sum = DenseOperator::Zero(controls[0].rows(), controls[0].cols());
  for (const auto& p : layout.drift) drift_sum += dense_pauli(p);
  const auto dim = controls[0].rows();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (int m = 0; m < protocol.slices(); ++m) {
    DenseOperator h = protocol.g * drift_sum;
    for (int k = 0; k < protocol.channels(); ++k) {
      h += protocol.h(m, k) * controls[static_cast<std::size_t>(k)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
    const Eigen::VectorXcd phases =
        (eig.eigenvalues().cast<cd>() * cd(0, -protocol.tau[static_cast<std::size_t>(m)]))
            .array()
            .exp();
    u = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint() * u;
  }
  return u;
}

double dense_propagate_check(const Eigen::VectorXd& c, const Protocol& protocol,
                             const ControlSystem& system) {
  check_sites(system.n(), kDensePropagationCap, "dense propagation check");
  const Eigen::VectorXd a0 = initial_vector(system.basis, c);
  const Eigen::MatrixXcd u = dense_propagator(protocol, system.layout);
  const DenseOperator k = u * realize_dense(a0, system.basis) * u.adjoint();
  const Eigen::VectorXd dense = project_dense(k, system.basis);
  const Eigen::VectorXd ode = propagate(a0, protocol, system.tensor);
  return (dense - ode).lpNorm<Eigen::Infinity>();
}

CircuitSimulation simulate_circuit(const PreparationCircuit& circuit) {
  const int q_count = circuit.qubit_count();
  if (q_count > kCircuitQubitCap) {
    throw SizeError("circuit simulation is limited to " + std::to_string(kCircuitQubitCap) +
                    " qubits");
  }
  const std::uint64_t dim = std::uint64_t{1} << q_count;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  psi[0] = 1.0;
  auto bit_of = [q_count](int qubit) { return std::uint64_t{1} << (q_count - 1 - qubit); };
  for (const auto& gate : circuit.gates) {
    for (int q : gate.qubits) {
      if (q < 0 || q >= q_count) throw InvalidInput("gate acts outside the register");
    }
    if (gate.name == "ry") {
      const std::uint64_t b = bit_of(gate.qubits[0]);
      const double co = std::cos(gate.angle), si = std::sin(gate.angle);
      for (std::uint64_t s = 0; s < dim; ++s) {
        if (s & b) continue;
        const cd v0 = psi[static_cast<Eigen::Index>(s)], v1 = psi[static_cast<Eigen::Index>(s | b)];
        psi[static_cast<Eigen::Index>(s)] = co * v0 - si * v1;
        psi[static_cast<Eigen::Index>(s | b)] = si * v0 + co * v1;
      }
    } else if (gate.name == "cx") {
      const std::uint64_t cb = bit_of(gate.qubits[0]), tb = bit_of(gate.qubits[1]);
      for (std::uint64_t s = 0; s < dim; ++s) {
        if ((s & cb) && !(s & tb)) {
          std::swap(psi[static_cast<Eigen::Index>(s)], psi[static_cast<Eigen::Index>(s | tb)]);
        }
      }
    } else {
      throw InvalidInput("unknown gate " + gate.name);
    }
  }

  const int n = circuit.n;
  const std::uint64_t sys_dim = std::uint64_t{1} << n;
  const std::uint64_t parity_bit = bit_of(circuit.parity_qubit);
  CircuitSimulation out;
  out.reduced = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(sys_dim),
                                       static_cast<Eigen::Index>(sys_dim));
  for (std::uint64_t s = 0; s < sys_dim; ++s) {
    for (std::uint64_t t = 0; t < sys_dim; ++t) {
      cd acc = 0.0;
      for (std::uint64_t a = 0; a < sys_dim; ++a) {
        std::uint64_t is = (s << (n + 1)) | (a << 1), it = (t << (n + 1)) | (a << 1);
        if (circuit.accepted_outcome == 1) {
          is |= parity_bit;
          it |= parity_bit;
        }
        acc += psi[static_cast<Eigen::Index>(is)] * std::conj(psi[static_cast<Eigen::Index>(it)]);
      }
      out.reduced(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) = acc;
    }
  }
  out.success_probability = out.reduced.trace().real();
  if (out.success_probability > 0.0) out.reduced /= out.success_probability;
  return out;
}

}  // namespace liethermal
