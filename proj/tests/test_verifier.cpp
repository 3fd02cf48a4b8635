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

#include <cmath>
#include <complex>
#include <random>
#include <string>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "liethermal/circuit_builder.hpp"
#include "liethermal/control.hpp"
#include "liethermal/errors.hpp"
#include "liethermal/models.hpp"
#include "liethermal/thermal_sampling.hpp"
#include "liethermal/verifier.hpp"

using namespace liethermal;

namespace {

using cd = std::complex<double>;

Eigen::VectorXd random_vector(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(d);
  for (auto& x : v) x = nd(rng);
  return v;
}

Protocol random_protocol(const ControlSystem& s, int slices, double t_f, double amp,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  auto p = Protocol::uniform(slices, s.channels(), t_f, s.layout.g);
  for (int i = 0; i < p.h.size(); ++i) p.h.data()[i] = u(rng);
  return p;
}

DenseOperator hamiltonian(const std::vector<double>& h, const ControlLayout& layout) {
  const auto dim = Eigen::Index{1} << layout.n;
  DenseOperator out = DenseOperator::Zero(dim, dim);
  for (std::size_t k = 0; k < h.size(); ++k) out += h[k] * dense_pauli(layout.controls[k]);
  for (const auto& p : layout.drift) out += layout.g * dense_pauli(p);
  return out;
}

}  // namespace

TEST(RealizeDense, SingleAndParityStrings) {
  auto basis = enumerate_table1(2);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(basis.dimension());
  a[basis.index(PauliString::parse("ZI"))] = 1.0;
  Eigen::VectorXcd diag(4);
  diag << 1, 1, -1, -1;
  EXPECT_LT((realize_dense(a, basis) - DenseOperator(diag.asDiagonal())).norm(), 1e-15);

  a.setZero();
  a[basis.index(PauliString::parse("ZZ"))] = 1.0;
  diag << 1, -1, -1, 1;
  EXPECT_LT((realize_dense(a, basis) - DenseOperator(diag.asDiagonal())).norm(), 1e-15);
}

TEST(RealizeDense, ProjectionRoundTripAndHermiticity) {
  for (int n : {2, 3, 5}) {
    auto basis = enumerate_table1(n);
    auto a = random_vector(basis.dimension(), 10 + n);
    DenseOperator k = realize_dense(a, basis);
    EXPECT_LT((k - k.adjoint()).norm(), 1e-13);
    EXPECT_LT((project_dense(k, basis) - a).lpNorm<Eigen::Infinity>(), 1e-13);
  }
  EXPECT_THROW(realize_dense(Eigen::VectorXd::Zero(3), enumerate_table1(2)), DimensionError);
}

TEST(DenseCommutator, ReproducesTheAdjointGenerator) {
  // project(-i [H, K(a)]) equals the structure-tensor generator applied to a.
  for (int n : {3, 4, 6}) {
    auto s = ControlSystem::build(n, 0.8);
    std::mt19937_64 rng(n);
    std::uniform_real_distribution<double> u(-2, 2);
    std::vector<double> h(static_cast<std::size_t>(s.channels()));
    for (auto& x : h) x = u(rng);
    auto a = random_vector(s.dimension(), 40 + n);
    DenseOperator hd = hamiltonian(h, s.layout), kd = realize_dense(a, s.basis);
    Eigen::VectorXd expect = project_dense(cd(0, -1) * (hd * kd - kd * hd), s.basis);
    auto g = assemble_generator(h, s.layout.g, s.tensor);
    Eigen::VectorXd got(a.size());
    g.apply(a.data(), got.data());
    EXPECT_LT((got - expect).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(ThermalState, TemperatureLimits) {
  auto basis = enumerate_table1(3);
  auto k = realize_dense(random_vector(basis.dimension(), 1), basis);
  auto rho0 = thermal_state(k, 0.0);
  EXPECT_LT((rho0 - Eigen::MatrixXcd::Identity(8, 8) / 8.0).norm(), 1e-14);

  ThermalSpectrum spectrum(k);
  auto cold = spectrum.state(1e4);
  Eigen::VectorXcd g = spectrum.vectors().col(0);
  EXPECT_LT((cold - g * g.adjoint()).norm(), 1e-10);
  EXPECT_NEAR(cold.trace().real(), 1.0, 1e-14);
}

TEST(ThermalState, DiagonalMatchesSamplerDistribution) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ub(0.1, 2.0);
  for (int n = 2; n <= 8; ++n) {
    auto basis = enumerate_table1(n);
    auto c = random_vector(n + 1, 70 + n);
    const double beta = ub(rng);
    auto rho = thermal_state(initial_operator(c, basis), beta);
    auto p = exact_distribution(c, beta);
    EXPECT_LT((rho.diagonal().real() - p).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_LT(rho.diagonal().imag().norm(), 1e-14);
  }
}

TEST(StateInfidelity, PureAndMixedExamples) {
  Eigen::VectorXcd psi(2), phi(2);
  psi << 1, 0;
  phi << std::sqrt(0.5), std::sqrt(0.5);
  Eigen::MatrixXcd r = psi * psi.adjoint(), s = phi * phi.adjoint();
  EXPECT_NEAR(state_infidelity(r, r), 0.0, 1e-15);
  EXPECT_NEAR(state_infidelity(r, s), 0.5, 1e-15);
  Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Identity(2, 2) / 2.0;
  EXPECT_NEAR(state_infidelity(mixed, mixed), 0.0, 1e-15);
  EXPECT_NEAR(state_infidelity(r, mixed), 1.0 - std::sqrt(0.5), 1e-15);
}

TEST(GroundStateBound, ExactAtTheTargetAndAboveTheTrueInfidelity) {
  auto basis = enumerate_table1(4);
  auto target = random_vector(basis.dimension(), 5);
  auto exact = ground_state_bound(target, target, basis);
  EXPECT_NEAR(exact.bound, 0.0, 1e-12);
  EXPECT_NEAR(exact.infidelity, 0.0, 1e-12);
  EXPECT_GT(exact.e1, exact.e0);

  for (int trial = 0; trial < 40; ++trial) {
    const double eps = 1e-3 * std::pow(2.0, trial % 10);
    auto prepared = target + eps * random_vector(basis.dimension(), 100 + trial);
    auto b = ground_state_bound(prepared, target, basis);
    EXPECT_GE(b.bound, -1e-12);
    EXPECT_GE(b.infidelity, -1e-12);
    EXPECT_GE(b.bound, b.infidelity - 1e-12);
  }
  auto small = ground_state_bound(target + 1e-4 * random_vector(basis.dimension(), 9), target,
                                  basis);
  EXPECT_LT(small.bound, 1e-5);
}

TEST(GroundStateBound, RejectsDegenerateTargets) {
  auto basis = enumerate_table1(2);
  Eigen::VectorXd t = Eigen::VectorXd::Zero(basis.dimension());
  t[basis.index(PauliString::parse("ZI"))] = 1.0;
  EXPECT_THROW(ground_state_bound(t, t, basis), DegenerateGap);
}

TEST(DensePropagation, TrivialProtocolsAreExact) {
  auto s = ControlSystem::build(3, 0.0);
  auto c = random_vector(4, 2);
  auto p = Protocol::uniform(6, s.channels(), 1.0, 0.0);
  EXPECT_LE(dense_propagate_check(c, p, s), 1e-13);
  p.h.col(0).setConstant(0.9);  // commutes with the diagonal K0
  EXPECT_LE(dense_propagate_check(c, p, s), 1e-13);
}

TEST(DensePropagation, MatchesTheAdjointOde) {
  for (int n : {3, 4, 5}) {
    auto s = ControlSystem::build(n, 1.0);
    auto p = random_protocol(s, 10, 1.3, 3.0, 60 + n);
    EXPECT_LE(dense_propagate_check(random_vector(n + 1, n), p, s), 1e-8);
  }
  auto big = ControlSystem::build(13, 1.0);
  EXPECT_THROW(dense_propagator(Protocol::uniform(1, big.channels(), 1.0, 1.0), big.layout),
               SizeError);
}

TEST(DensePropagation, ThermalStatesConjugateWithTheOperator) {
  auto s = ControlSystem::build(4, 1.0);
  auto p = random_protocol(s, 8, 1.0, 2.0, 77);
  auto c = random_vector(5, 6);
  const double beta = 0.7;
  auto u = dense_propagator(p, s.layout);
  auto a_f = propagate(initial_vector(s.basis, c), p, s.tensor);
  Eigen::MatrixXcd evolved = u * thermal_state(initial_operator(c, s.basis), beta) * u.adjoint();
  Eigen::MatrixXcd direct = thermal_state(realize_dense(a_f, s.basis), beta);
  EXPECT_LT((evolved - direct).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((u * u.adjoint() - Eigen::MatrixXcd::Identity(16, 16)).norm(), 1e-12);
}

TEST(CircuitSimulation, PreparesTheInitialThermalState) {
  for (int n : {2, 3}) {
    auto basis = enumerate_table1(n);
    for (int trial = 0; trial < 4; ++trial) {
      auto c = random_vector(n + 1, 300 + 10 * n + trial);
      const double beta = 0.3 + 0.5 * trial;
      auto circ = build_circuit(c, beta);
      auto sim = simulate_circuit(circ);
      auto rho = thermal_state(initial_operator(c, basis), beta);
      EXPECT_LT((sim.reduced - rho).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_NEAR(sim.success_probability, circ.success_probability, 1e-12);
    }
  }
}

TEST(CircuitSimulation, RejectsUnknownGatesAndLargeRegisters) {
  auto circ = build_circuit(random_vector(3, 1), 1.0);
  circ.gates.push_back({"rz", {0}, 0.1});
  EXPECT_THROW(simulate_circuit(circ), InvalidInput);
  EXPECT_THROW(simulate_circuit(build_circuit(random_vector(8, 1), 1.0)), SizeError);
}

TEST(DenseRealization, ThirdOrderProcessIdentity) {
  // [X_{j-1}X_j, [X_j X_{j+1}, Z_j]] = 4 X_{j-1} Z_j X_{j+1} as matrices.
  for (int n = 3; n <= 8; ++n) {
    for (int j = 2; j < n; ++j) {
      std::string wa(n, 'I'), wb(n, 'I'), wz(n, 'I'), wt(n, 'I');
      wa[j - 2] = wa[j - 1] = 'X';
      wb[j - 1] = wb[j] = 'X';
      wz[j - 1] = 'Z';
      wt[j - 2] = wt[j] = 'X';
      wt[j - 1] = 'Z';
      const DenseOperator a = dense_pauli(PauliString::parse(wa));
      const DenseOperator b = dense_pauli(PauliString::parse(wb));
      const DenseOperator z = dense_pauli(PauliString::parse(wz));
      const DenseOperator inner = b * z - z * b;
      const DenseOperator outer = a * inner - inner * a;
      EXPECT_EQ((outer - 4.0 * dense_pauli(PauliString::parse(wt))).norm(), 0.0)
          << "n=" << n << " j=" << j;
    }
  }
}

TEST(GroundStateBound, ShrinksWithThePerturbation) {
  auto basis = enumerate_table1(5);
  auto target = random_vector(basis.dimension(), 12);
  auto direction = random_vector(basis.dimension(), 13);
  double previous = INFINITY;
  for (double eps : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
    const double b = ground_state_bound(target + eps * direction, target, basis).bound;
    EXPECT_LT(b, previous) << "eps=" << eps;
    previous = b;
  }
}
