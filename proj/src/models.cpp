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

#include "liethermal/models.hpp"

#include <cmath>

#include "liethermal/errors.hpp"

namespace liethermal {

ClusterIsingParams normalize_params(const std::array<double, 3>& raw,
                                    double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidInput("lambda scale must be positive");
  }
  double sum = 0.0;
  for (double w : raw) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidInput("cluster Ising weights must be finite and nonnegative");
    }
    sum += w;
  }
  if (sum == 0.0) throw InvalidInput("cluster Ising weights are all zero");
  return {lambda * raw[0] / sum, lambda * raw[1] / sum, lambda * raw[2] / sum,
          lambda};
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> kPresets = {
      {"center", {1.0 / 3, 1.0 / 3, 1.0 / 3}, true},
      {"edge_z_xx", {0.5, 0.5, 0.0}, true},
      {"edge_xx_xzx", {0.0, 0.5, 0.5}, true},
      {"edge_z_xzx", {0.5, 0.0, 0.5}, true},
      {"paramagnet", {1.0, 0.0, 0.0}, false},
      {"ising", {0.0, 1.0, 0.0}, false},
      {"cluster", {0.0, 0.0, 1.0}, false},
  };
  return kPresets;
}

std::optional<Preset> find_preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

std::vector<PauliString> ControlLayout::generators() const {
  std::vector<PauliString> all = controls;
  all.insert(all.end(), drift.begin(), drift.end());
  return all;
}

ControlLayout make_control_layout(int n, double g) {
  if (n < 2) throw UnsupportedSize("control layout needs n >= 2");
  if (!std::isfinite(g)) throw InvalidInput("coupling g must be finite");
  ControlLayout layout;
  layout.n = n;
  layout.g = g;
  for (int j = 1; j <= n; ++j) layout.controls.push_back(PauliString::single(n, 'Z', j));
  layout.controls.push_back(PauliString::single(n, 'X', 1));
  layout.controls.push_back(PauliString::single(n, 'X', n));
  for (int j = 1; j < n; ++j) {
    std::string word(n, 'I');
    word[j - 1] = 'X';
    word[j] = 'X';
    layout.drift.push_back(PauliString::parse(word));
  }
  return layout;
}

StructureTensor system_tensor(const LieBasis& basis, const ControlLayout& layout) {
  if (basis.n != layout.n) {
    throw DimensionError("basis and control layout disagree on n");
  }
  const auto gens = layout.generators();
  return StructureTensor(basis, gens, layout.channel_count());
}

Eigen::VectorXd cluster_ising_target(int n, const ClusterIsingParams& params,
                                     const LieBasis& basis) {
  if (n < 3) {
    throw UnsupportedSize("the cluster Ising target needs n >= 3, got " +
                          std::to_string(n));
  }
  if (basis.n != n) throw DimensionError("basis built for a different n");

  Eigen::VectorXd a = Eigen::VectorXd::Zero(basis.dimension());
  auto put = [&](const std::string& word, double value) {
    const int idx = basis.index(PauliString::parse(word));
    if (idx < 0) throw Error("target term " + word + " is not in the basis");
    a[idx] += value;
  };
  auto word_with = [n](std::initializer_list<std::pair<int, char>> ops) {
    std::string w(n, 'I');
    for (auto [site, op] : ops) w[site - 1] = op;
    return w;
  };

  for (int j = 1; j <= n; ++j) put(word_with({{j, 'Z'}}), params.lambda1);
  for (int j = 1; j < n; ++j) {
    put(word_with({{j, 'X'}, {j + 1, 'X'}}), params.lambda2);
  }
  put(word_with({{1, 'Z'}, {2, 'X'}}), -params.lambda3);
  for (int j = 2; j < n; ++j) {
    put(word_with({{j - 1, 'X'}, {j, 'Z'}, {j + 1, 'X'}}), -params.lambda3);
  }
  put(word_with({{n - 1, 'X'}, {n, 'Z'}}), -params.lambda3);
  return a;
}

}  // namespace liethermal
