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

#include "liethermal/thermal_sampling.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "liethermal/errors.hpp"
#include "liethermal/parallel.hpp"

namespace liethermal {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_abs_tanh(double x) {
  if (x == 0.0) return kNegInf;
  const double t = std::exp(-2.0 * std::abs(x));
  return std::log1p(-t) - std::log1p(t);
}

void check_spin(int z) {
  if (z != 1 && z != -1) throw InvalidInput("spin values must be +1 or -1");
}

int prefix_parity(std::span<const int> prefix) {
  int p = 1;
  for (int z : prefix) {
    check_spin(z);
    p *= z;
  }
  return p;
}

}  // namespace

double site_weight(double x, int z) {
  const double e = 2.0 * x * z;
  if (e > 0.0) {
    const double t = std::exp(-e);
    return t / (1.0 + t);
  }
  return 1.0 / (1.0 + std::exp(e));
}

double ChainTables::defect(int j, int parity) const {
  const double L = parity_log[static_cast<std::size_t>(j)];
  if (parity_sign[static_cast<std::size_t>(j)] * parity > 0) return -std::expm1(L);
  return 1.0 + std::exp(L);
}

ChainTables chain_tables(const Eigen::VectorXd& c, double beta) {
  if (c.size() < 2) throw InvalidInput("need c0 and at least one site coefficient");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidInput("beta must be >= 0");
  if (!c.allFinite()) throw NumericError("non-finite initial-condition coefficients");
  ChainTables t;
  t.n = static_cast<int>(c.size()) - 1;
  t.beta = beta;
  const auto len = static_cast<std::size_t>(t.n + 1);
  t.x.resize(len);
  t.m.resize(len);
  t.log_abs.resize(len);
  t.sign.resize(len);
  for (std::size_t j = 0; j < len; ++j) {
    t.x[j] = beta * c[static_cast<int>(j)];
    t.m[j] = std::tanh(t.x[j]);
    t.log_abs[j] = log_abs_tanh(t.x[j]);
    t.sign[j] = t.x[j] < 0.0 ? -1 : 1;
  }
  t.parity_log.assign(len, 0.0);
  t.parity_sign.assign(len, 1);
  t.parity_weight.assign(len, 0.0);
  double log_tail = t.log_abs[0];
  int sign_tail = t.sign[0];
  for (int j = t.n; j >= 0; --j) {
    const auto uj = static_cast<std::size_t>(j);
    const int flip = (t.n - j) % 2 == 0 ? 1 : -1;
    t.parity_log[uj] = log_tail;
    t.parity_sign[uj] = flip * sign_tail;
    t.parity_weight[uj] = t.parity_sign[uj] * std::exp(log_tail);
    if (j >= 1) {
      log_tail += t.log_abs[uj];
      sign_tail *= t.sign[uj];
    }
  }
  t.normalization = 0.5 * t.defect(0, 1);
  if (!(t.normalization > 0.0)) {
    throw NumericError("Gibbs normalization underflows at this beta");
  }
  return t;
}

double marginal_probability(const ChainTables& tables, std::span<const int> prefix) {
  const int j = static_cast<int>(prefix.size());
  if (j > tables.n) throw InvalidInput("prefix longer than the chain");
  const int parity = prefix_parity(prefix);
  double p = 1.0;
  for (int i = 0; i < j; ++i) {
    const auto k = static_cast<std::size_t>(i);
    p *= site_weight(tables.x[k + 1], prefix[k]);
  }
  return p * 0.5 * tables.defect(j, parity) / tables.normalization;
}

double conditional_probability(const ChainTables& tables, std::span<const int> prefix,
                               int candidate) {
  const int j = static_cast<int>(prefix.size());
  if (j >= tables.n) throw InvalidInput("prefix already covers the chain");
  check_spin(candidate);
  const int parity = prefix_parity(prefix);
  const double denom = tables.defect(j, parity);
  if (!(denom > 0.0)) throw InvalidInput("conditioning on a zero-probability prefix");
  return site_weight(tables.x[static_cast<std::size_t>(j + 1)], candidate) *
         tables.defect(j + 1, parity * candidate) / denom;
}

SpinSample draw_sample(const ChainTables& tables, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  SpinSample s;
  s.z.reserve(static_cast<std::size_t>(tables.n));
  int parity = 1;
  double denom = tables.defect(0, 1);
  for (int j = 0; j < tables.n; ++j) {
    const double up_defect = tables.defect(j + 1, parity);
    const double p_up =
        site_weight(tables.x[static_cast<std::size_t>(j + 1)], 1) * up_defect / denom;
    const int z = uniform(rng) < p_up ? 1 : -1;
    s.z.push_back(z);
    parity *= z;
    denom = z == 1 ? up_defect : tables.defect(j + 1, parity);
  }
  s.z0 = parity;
  return s;
}

std::vector<SpinSample> draw_samples(const ChainTables& tables, int count, std::uint64_t seed,
                                     int threads) {
  if (count < 0) throw InvalidInput("sample count must be non-negative");
  std::vector<SpinSample> out(static_cast<std::size_t>(count));
  const int streams = (count + kSampleStreamLength - 1) / kSampleStreamLength;
  parallel_for(streams, threads, [&](int stream) {
    std::mt19937_64 rng(substream_seed(seed, static_cast<std::uint64_t>(stream)));
    const int begin = stream * kSampleStreamLength;
    const int end = std::min(count, begin + kSampleStreamLength);
    for (int i = begin; i < end; ++i) out[static_cast<std::size_t>(i)] = draw_sample(tables, rng);
  });
  return out;
}

double k0_eigenvalue(const Eigen::VectorXd& c, std::span<const int> z) {
  if (static_cast<int>(z.size()) + 1 != c.size()) throw DimensionError("spin count mismatch");
  double e = 0.0;
  int parity = 1;
  for (std::size_t j = 0; j < z.size(); ++j) {
    check_spin(z[j]);
    e += c[static_cast<int>(j) + 1] * z[j];
    parity *= z[j];
  }
  return e + c[0] * parity;
}

Eigen::VectorXd exact_distribution(const Eigen::VectorXd& c, double beta) {
  const int n = static_cast<int>(c.size()) - 1;
  if (n > kMaxEnumerationSites) {
    throw SizeError("exact enumeration is limited to n <= " +
                    std::to_string(kMaxEnumerationSites));
  }
  const ChainTables t = chain_tables(c, beta);
  const std::size_t states = std::size_t{1} << n;
  Eigen::VectorXd p(static_cast<Eigen::Index>(states));
  for (std::size_t idx = 0; idx < states; ++idx) {
    double w = 1.0;
    int parity = 1;
    for (int j = 1; j <= n; ++j) {
      const int z = (idx >> (n - j)) & 1U ? -1 : 1;
      w *= site_weight(t.x[static_cast<std::size_t>(j)], z);
      parity *= z;
    }
    p[static_cast<Eigen::Index>(idx)] = w * site_weight(t.x[0], parity) / t.normalization;
  }
  return p;
}

}  // namespace liethermal
