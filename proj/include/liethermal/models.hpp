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

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "liethermal/pauli_algebra.hpp"

namespace liethermal {

/// Weights of the Z, XX and XZX families of the cluster Ising chain with
/// lambda1 + lambda2 + lambda3 == lambda.
struct ClusterIsingParams {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  double lambda = 1.0;
};

ClusterIsingParams normalize_params(const std::array<double, 3>& raw,
                                    double lambda);

/// Named points of the phase triangle. They stand in for the critical and
/// non-critical regimes; they are not the coordinates of any published point.
struct Preset {
  std::string name;
  std::array<double, 3> weights;
  bool critical;
};

const std::vector<Preset>& presets();
std::optional<Preset> find_preset(std::string_view name);

/// Controls are Z_1..Z_n followed by X_1 and X_n; the drift X_j X_{j+1}
/// couplings all run at the fixed amplitude g.
struct ControlLayout {
  int n = 0;
  double g = 1.0;
  std::vector<PauliString> controls;
  std::vector<PauliString> drift;

  int channel_count() const { return static_cast<int>(controls.size()); }
  int drift_count() const { return static_cast<int>(drift.size()); }
  /// controls then drift, the generator order used by system tensors.
  std::vector<PauliString> generators() const;
};

ControlLayout make_control_layout(int n, double g);

/// Structure tensor over the layout's generators (controls first).
StructureTensor system_tensor(const LieBasis& basis, const ControlLayout& layout);

/// Coefficients of the cluster Ising Hamiltonian in the basis.
Eigen::VectorXd cluster_ising_target(int n, const ClusterIsingParams& params,
                                     const LieBasis& basis);

}  // namespace liethermal
