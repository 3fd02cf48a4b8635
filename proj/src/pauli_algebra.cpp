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

#include "liethermal/pauli_algebra.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <unordered_set>

#include "liethermal/digest.hpp"
#include "liethermal/errors.hpp"

namespace liethermal {

namespace {

std::uint64_t site_bit(int site) { return std::uint64_t{1} << (site - 1); }

// Sites a..b inclusive (1-based); empty when a > b.
std::uint64_t site_range(int a, int b) {
  std::uint64_t mask = 0;
  for (int s = a; s <= b; ++s) mask |= site_bit(s);
  return mask;
}

std::uint64_t all_sites(int n) {
  return n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

void check_same_n(const PauliString& p, const PauliString& q) {
  if (p.n != q.n) {
    throw DimensionError("Pauli strings on " + std::to_string(p.n) + " and " +
                         std::to_string(q.n) + " sites");
  }
}

void check_algebra_size(int n) {
  if (n < 2) {
    throw UnsupportedSize("the Lie algebra needs n >= 2 sites, got " +
                          std::to_string(n));
  }
  if (n > kMaxSites) {
    throw UnsupportedSize("at most " + std::to_string(kMaxSites) +
                          " sites fit in one mask word, got " +
                          std::to_string(n));
  }
}

std::vector<PauliString> system_generators(int n) {
  std::vector<PauliString> gens;
  gens.emplace_back(n, site_bit(1), 0);
  gens.emplace_back(n, site_bit(n), 0);
  for (int j = 1; j <= n; ++j) gens.emplace_back(n, 0, site_bit(j));
  for (int j = 1; j < n; ++j) gens.emplace_back(n, site_bit(j) | site_bit(j + 1), 0);
  return gens;
}

LieBasis finish_basis(int n, std::vector<PauliString> elements) {
  std::vector<std::pair<RowKey, PauliString>> keyed;
  keyed.reserve(elements.size());
  for (const auto& e : elements) {
    auto key = row_key(e);
    if (!key) throw Error("element " + e.to_string() + " has no row form");
    keyed.emplace_back(*key, e);
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  LieBasis basis;
  basis.n = n;
  basis.elements.reserve(keyed.size());
  for (auto& [key, e] : keyed) {
    basis.index_of.emplace(e, static_cast<int>(basis.elements.size()));
    basis.elements.push_back(e);
  }
  cartan_classify(basis);
  return basis;
}

}  // namespace

PauliString::PauliString(int sites, std::uint64_t x, std::uint64_t z)
    : x_mask(x), z_mask(z), n(sites) {
  if (sites < 1 || sites > kMaxSites) {
    throw UnsupportedSize("Pauli strings support 1.." +
                          std::to_string(kMaxSites) + " sites");
  }
  if (((x | z) & ~all_sites(sites)) != 0) {
    throw InvalidInput("mask bits beyond site " + std::to_string(sites));
  }
}

PauliString PauliString::parse(std::string_view word) {
  const int n = static_cast<int>(word.size());
  std::uint64_t x = 0, z = 0;
  for (int s = 1; s <= n; ++s) {
    switch (word[s - 1]) {
      case 'I': break;
      case 'X': x |= site_bit(s); break;
      case 'Y': x |= site_bit(s); z |= site_bit(s); break;
      case 'Z': z |= site_bit(s); break;
      default:
        throw InvalidInput("not a Pauli word: " + std::string(word));
    }
  }
  return PauliString(n, x, z);
}

PauliString PauliString::single(int sites, char op, int site) {
  if (site < 1 || site > sites) throw InvalidInput("site out of range");
  std::string word(sites, 'I');
  word[site - 1] = op;
  return parse(word);
}

char PauliString::op_at(int site) const {
  const bool x = (x_mask & site_bit(site)) != 0;
  const bool z = (z_mask & site_bit(site)) != 0;
  if (x && z) return 'Y';
  if (x) return 'X';
  if (z) return 'Z';
  return 'I';
}

std::string PauliString::to_string() const {
  std::string out(n, 'I');
  for (int s = 1; s <= n; ++s) out[s - 1] = op_at(s);
  return out;
}

bool PauliString::commutes_with(const PauliString& other) const {
  return ((std::popcount(x_mask & other.z_mask) +
           std::popcount(z_mask & other.x_mask)) & 1) == 0;
}

PauliProduct pauli_product(const PauliString& p, const PauliString& q) {
  check_same_n(p, q);
  // (i^yp X^xp Z^zp)(i^yq X^xq Z^zq) = i^{yp+yq} (-1)^{|zp & xq|} X^{xp^xq} Z^{zp^zq}
  PauliString r(p.n, p.x_mask ^ q.x_mask, p.z_mask ^ q.z_mask);
  const int phase = p.y_count() + q.y_count() +
                    2 * std::popcount(p.z_mask & q.x_mask) - r.y_count();
  return {((phase % 4) + 4) % 4, r};
}

std::optional<Commutator> commutator(const PauliString& p,
                                     const PauliString& q) {
  check_same_n(p, q);
  if (p.commutes_with(q)) return std::nullopt;
  // [P, Q] = 2 i^phase R with an odd phase, and -i lambda = 2 i^phase.
  const auto prod = pauli_product(p, q);
  return Commutator{prod.phase == 1 ? -2.0 : 2.0, prod.result};
}

std::optional<RowKey> row_key(const PauliString& p) {
  const int n = p.n;
  const std::uint64_t x = p.x_mask;
  const std::uint64_t z_only = p.z_mask & ~x;
  const int flips = std::popcount(x);

  if (flips == 0) {
    if (std::popcount(z_only) == 1) {
      return RowKey{1, std::countr_zero(z_only) + 1, 0};
    }
    if (n >= 2 && z_only == all_sites(n)) return RowKey{10, 0, 0};
    return std::nullopt;
  }

  auto is_y = [&](int site) { return (p.z_mask & site_bit(site)) != 0; };

  if (flips == 2) {
    const int j = std::countr_zero(x) + 1;
    const int k = 64 - std::countl_zero(x);
    if (z_only != site_range(j + 1, k - 1)) return std::nullopt;
    const int row = 2 + (is_y(j) ? 2 : 0) + (is_y(k) ? 1 : 0);
    return RowKey{row, j, k};
  }

  if (flips == 1) {
    // Prefix and suffix Z runs are both empty only when n == 1.
    const int j = std::countr_zero(x) + 1;
    if (z_only == site_range(1, j - 1)) return RowKey{is_y(j) ? 7 : 6, j, 0};
    if (z_only == site_range(j + 1, n)) return RowKey{is_y(j) ? 9 : 8, j, 0};
  }
  return std::nullopt;
}

int LieBasis::index(const PauliString& p) const {
  auto it = index_of.find(p);
  return it == index_of.end() ? -1 : it->second;
}

int expected_dimension(int n) { return 2 * n * n + 3 * n + 1; }

LieBasis generate_closure(int n) {
  check_algebra_size(n);
  std::vector<PauliString> elements;
  std::unordered_set<PauliString, PauliStringHash> seen;
  std::deque<PauliString> pending;
  for (const auto& g : system_generators(n)) {
    if (seen.insert(g).second) {
      elements.push_back(g);
      pending.push_back(g);
    }
  }
  // Every pair is bracketed once: a popped element meets all elements known at
  // that time, and anything added later meets it when popped itself.
  while (!pending.empty()) {
    const PauliString e = pending.front();
    pending.pop_front();
    const std::size_t known = elements.size();
    for (std::size_t i = 0; i < known; ++i) {
      auto c = commutator(e, elements[i]);
      if (c && seen.insert(c->result).second) {
        elements.push_back(c->result);
        pending.push_back(c->result);
      }
    }
  }
  return finish_basis(n, std::move(elements));
}

LieBasis enumerate_table1(int n) {
  check_algebra_size(n);
  std::vector<PauliString> elements;
  elements.reserve(static_cast<std::size_t>(expected_dimension(n)));
  auto add = [&](std::uint64_t x, std::uint64_t z) {
    elements.emplace_back(n, x, z);
  };

  for (int j = 1; j <= n; ++j) add(0, site_bit(j));  // (i)
  for (int ends = 0; ends < 4; ++ends) {              // (ii)..(v)
    const bool y_first = ends >= 2;
    const bool y_last = (ends & 1) != 0;
    for (int j = 1; j <= n; ++j) {
      for (int k = j + 1; k <= n; ++k) {
        std::uint64_t z = site_range(j + 1, k - 1);
        if (y_first) z |= site_bit(j);
        if (y_last) z |= site_bit(k);
        add(site_bit(j) | site_bit(k), z);
      }
    }
  }
  for (int y = 0; y < 2; ++y) {  // (vi), (vii)
    for (int j = 1; j <= n; ++j) {
      add(site_bit(j), site_range(1, j - 1) | (y ? site_bit(j) : 0));
    }
  }
  for (int y = 0; y < 2; ++y) {  // (viii), (ix)
    for (int j = 1; j <= n; ++j) {
      add(site_bit(j), site_range(j + 1, n) | (y ? site_bit(j) : 0));
    }
  }
  add(0, all_sites(n));  // (x)
  return finish_basis(n, std::move(elements));
}

void cartan_classify(LieBasis& basis) {
  const int n = basis.n;
  basis.cartan_label.resize(basis.elements.size());
  for (std::size_t i = 0; i < basis.elements.size(); ++i) {
    basis.cartan_label[i] =
        (basis.elements[i].y_count() % 2 == 1) ? CartanLabel::K : CartanLabel::M;
  }
  basis.h_indices.clear();
  basis.h_indices.push_back(basis.index(PauliString(n, 0, all_sites(n))));
  for (int j = 1; j <= n; ++j) {
    basis.h_indices.push_back(basis.index(PauliString(n, 0, site_bit(j))));
  }
  for (int idx : basis.h_indices) {
    if (idx < 0) throw Error("basis lacks a maximal Abelian element");
  }
}

std::string basis_hash(const LieBasis& basis) {
  std::string text = "liethermal-basis-v1\nn=" + std::to_string(basis.n) + "\n";
  char line[64];
  for (std::size_t i = 0; i < basis.elements.size(); ++i) {
    const auto& e = basis.elements[i];
    std::snprintf(line, sizeof(line), "%016llx %016llx %c\n",
                  static_cast<unsigned long long>(e.x_mask),
                  static_cast<unsigned long long>(e.z_mask),
                  basis.cartan_label[i] == CartanLabel::K ? 'K' : 'M');
    text += line;
  }
  text += "h";
  for (int idx : basis.h_indices) text += " " + std::to_string(idx);
  text += "\n";
  return sha256_hex(text);
}

StructureTensor::StructureTensor(const LieBasis& basis,
                                 std::span<const PauliString> generators,
                                 int control_count)
    : dimension_(basis.dimension()),
      control_count_(control_count < 0 ? static_cast<int>(generators.size())
                                        : control_count),
      generators_(generators.begin(), generators.end()) {
  if (control_count_ > generator_count()) {
    throw LayoutError("more control channels than generators");
  }
  for (std::size_t k = 0; k < generators_.size(); ++k) {
    const int gi = basis.index(generators_[k]);
    if (gi < 0) {
      throw UnknownGenerator("generator " + generators_[k].to_string() +
                             " is not a basis element");
    }
    generator_index_.push_back(gi);
    for (int j = 0; j < dimension_; ++j) {
      auto c = commutator(basis.elements[j], generators_[k]);
      if (!c) continue;
      const int l = basis.index(c->result);
      if (l < 0) {
        throw Error("commutator " + c->result.to_string() +
                    " leaves the basis");
      }
      entries_.push_back({l, j, static_cast<int>(k), c->lambda});
    }
  }
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t e = 1; e < entries_.size(); ++e) {
    if (entries_[e].row == entries_[e - 1].row &&
        entries_[e].col == entries_[e - 1].col) {
      throw Error("generators share a structure-constant entry");
    }
  }
  row_start_.assign(static_cast<std::size_t>(dimension_) + 1, 0);
  for (const auto& e : entries_) ++row_start_[static_cast<std::size_t>(e.row) + 1];
  for (int r = 0; r < dimension_; ++r) row_start_[r + 1] += row_start_[r];
}

Eigen::SparseMatrix<double> StructureTensor::lambda_matrix(int generator) const {
  if (generator < 0 || generator >= generator_count()) {
    throw InvalidInput("generator index out of range");
  }
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& e : entries_) {
    if (e.generator == generator) triplets.emplace_back(e.row, e.col, e.lambda);
  }
  Eigen::SparseMatrix<double> m(dimension_, dimension_);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

StructureTensor structure_tensor(const LieBasis& basis,
                                 std::span<const PauliString> generators) {
  return StructureTensor(basis, generators);
}

}  // namespace liethermal
