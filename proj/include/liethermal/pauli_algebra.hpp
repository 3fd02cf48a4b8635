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

#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/SparseCore>

namespace liethermal {

inline constexpr int kMaxSites = 64;

/**
 * A phase-free Pauli word on n sites stored as two bitmasks.
 *
 * Bit s of a mask refers to site s + 1 (sites are numbered from 1 in names
 * and string renderings). A site carries X when only its x bit is set, Z when
 * only its z bit is set and Y when both are set. The represented operator is
 * i^{popcount(x & z)} X^x Z^z, so every string is Hermitian.
 */
struct PauliString {
  std::uint64_t x_mask = 0;
  std::uint64_t z_mask = 0;
  int n = 0;

  PauliString() = default;
  PauliString(int sites, std::uint64_t x, std::uint64_t z);

  /// Parses a dense word such as "XZIY"; the first letter is site 1.
  static PauliString parse(std::string_view word);
  static PauliString single(int sites, char op, int site);

  int y_count() const { return std::popcount(x_mask & z_mask); }
  bool is_identity() const { return (x_mask | z_mask) == 0; }
  char op_at(int site) const;
  std::string to_string() const;

  bool commutes_with(const PauliString& other) const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
};

struct PauliStringHash {
  std::size_t operator()(const PauliString& p) const noexcept {
    std::uint64_t h = p.x_mask * 0x9E3779B97F4A7C15ULL;
    h ^= (p.z_mask + 0x632BE59BD9B4E019ULL) + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h ^ static_cast<std::uint64_t>(p.n));
  }
};

/// P * Q = i^phase * result.
struct PauliProduct {
  int phase = 0;  // exponent of i, in 0..3
  PauliString result;
};

/// [P, Q] = -i * lambda * result.
struct Commutator {
  double lambda = 0.0;
  PauliString result;
};

PauliProduct pauli_product(const PauliString& p, const PauliString& q);

/// Empty when P and Q commute; otherwise lambda is +2 or -2.
std::optional<Commutator> commutator(const PauliString& p,
                                     const PauliString& q);

enum class CartanLabel : std::uint8_t { K, M };

/// Position of an element inside the closed-form row families of the algebra.
/// Rows are numbered 1..10; `first`/`second` are 1-based site indices (second
/// is zero for single-index rows).
struct RowKey {
  int row = 0;
  int first = 0;
  int second = 0;
  auto operator<=>(const RowKey&) const = default;
};

/// Returns the row key of p, or empty when p is not of one of the ten
/// row forms of the algebra.
std::optional<RowKey> row_key(const PauliString& p);

struct LieBasis {
  int n = 0;
  std::vector<PauliString> elements;
  std::unordered_map<PauliString, int, PauliStringHash> index_of;
  std::vector<CartanLabel> cartan_label;
  /// Parity string first, then Z_1..Z_n; slot i pairs with initial-condition
  /// coefficient c[i] (c[0] multiplies the parity string).
  std::vector<int> h_indices;

  int dimension() const { return static_cast<int>(elements.size()); }
  int index(const PauliString& p) const;  // -1 when absent
  bool contains(const PauliString& p) const { return index(p) >= 0; }
};

int expected_dimension(int n);

/// Breadth-first commutator closure of {X_1, X_n, Z_j, X_j X_{j+1}}, re-sorted
/// into row order and Cartan-classified.
LieBasis generate_closure(int n);

/// The same basis built directly from the ten closed-form row families.
LieBasis enumerate_table1(int n);

/// Fills labels (K iff odd Y count) and the maximal Abelian subset indices.
void cartan_classify(LieBasis& basis);

/// SHA-256 over a canonical rendering of (n, elements, labels, h_indices).
std::string basis_hash(const LieBasis& basis);

/**
 * Structure constants of the adjoint action of a list of generators.
 *
 * For generator k the matrix Lambda_k has entries Lambda_k[l][j] = lambda with
 * [b_j, g_k] = -i lambda b_l. Two distinct Pauli generators never map the same
 * column onto the same row, so all generators share one disjoint sparsity
 * pattern; entries are stored once with the owning generator recorded.
 */
class StructureTensor {
 public:
  struct Entry {
    int row;
    int col;
    int generator;
    double lambda;
  };

  StructureTensor() = default;
  /// The first `control_count` generators are control channels, the rest are
  /// drift terms sharing one amplitude; -1 makes every generator a control.
  StructureTensor(const LieBasis& basis, std::span<const PauliString> generators,
                  int control_count = -1);

  int dimension() const { return dimension_; }
  int generator_count() const { return static_cast<int>(generators_.size()); }
  int control_count() const { return control_count_; }
  int drift_count() const { return generator_count() - control_count_; }
  const std::vector<PauliString>& generators() const { return generators_; }
  const std::vector<int>& generator_indices() const { return generator_index_; }

  /// Entries sorted by (row, col); `row_start()` gives CSR offsets.
  const std::vector<Entry>& entries() const { return entries_; }
  const std::vector<int>& row_start() const { return row_start_; }

  Eigen::SparseMatrix<double> lambda_matrix(int generator) const;

 private:
  int dimension_ = 0;
  int control_count_ = 0;
  std::vector<PauliString> generators_;
  std::vector<int> generator_index_;
  std::vector<Entry> entries_;
  std::vector<int> row_start_;
};

StructureTensor structure_tensor(const LieBasis& basis,
                                 std::span<const PauliString> generators);

}  // namespace liethermal
