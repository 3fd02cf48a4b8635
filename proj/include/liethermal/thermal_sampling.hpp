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

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace liethermal {

/**
 * Per-site tables for sampling the Gibbs distribution of
 * K0 = c0 Z_1...Z_n + sum_j c_j Z_j in the computational basis.
 *
 * m_j = tanh(beta c_j). Products of many m_j are kept as a log-magnitude and
 * a sign so that they neither underflow nor lose the distance to one.
 */
struct ChainTables {
  int n = 0;
  double beta = 0.0;
  std::vector<double> x;        // beta c_j, j = 0..n
  std::vector<double> m;        // tanh(beta c_j)
  std::vector<double> log_abs;  // log|m_j| (-inf when m_j = 0)
  std::vector<int> sign;        // sign of m_j (+1 for zero)
  /// Parity coupling seen after fixing j spins:
  /// m0^{(j)} = (-1)^{n-j} m_0 prod_{i>j} m_i, j = 0..n (entry 0 multiplies
  /// every m_i).
  std::vector<double> parity_weight;
  std::vector<double> parity_log;  // log|m0^{(j)}|
  std::vector<int> parity_sign;
  double normalization = 0.5;  // N_beta

  /// 1 - m0^{(j)} * prefix_parity, computed without cancellation.
  double defect(int j, int prefix_parity) const;
};

ChainTables chain_tables(const Eigen::VectorXd& c, double beta);

/// Q(m, z) = (1 - m z) / 2 evaluated as 1 / (1 + exp(2 x z)) with x = beta c.
double site_weight(double x, int z);

/// p(z_1..z_j): probability of a prefix of spins (each +1 or -1).
double marginal_probability(const ChainTables& tables, std::span<const int> prefix);

/// p(z_{j+1} = candidate | z_1..z_j).
double conditional_probability(const ChainTables& tables, std::span<const int> prefix,
                               int candidate);

struct SpinSample {
  std::vector<int> z;  // +1 or -1 per site; bit b maps to z = 1 - 2 b
  int z0 = 1;          // product of all z
};

SpinSample draw_sample(const ChainTables& tables, std::mt19937_64& rng);

/// `count` samples from seed-derived substreams of fixed length, so the
/// output does not depend on the thread count.
std::vector<SpinSample> draw_samples(const ChainTables& tables, int count, std::uint64_t seed,
                                     int threads = 1);

/// Samples per substream of draw_samples.
inline constexpr int kSampleStreamLength = 4096;

/// Eigenvalue of K0 on the product state |z>.
double k0_eigenvalue(const Eigen::VectorXd& c, std::span<const int> z);

/// Largest n accepted by exact_distribution.
inline constexpr int kMaxEnumerationSites = 20;

/// Probabilities of all 2^n spin strings. Index bit (n - j) holds site j, so
/// site 1 is the most significant bit; a set bit means z = -1.
Eigen::VectorXd exact_distribution(const Eigen::VectorXd& c, double beta);

}  // namespace liethermal
