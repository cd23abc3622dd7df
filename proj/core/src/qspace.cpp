// Copyright 2026 The dissipent Authors
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

#include "dissipent/qspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dissipent/errors.hpp"

namespace dissipent {

namespace {

constexpr std::int64_t kMaxFullDim = 50'000'000;

}  // namespace

CompositeSpace CompositeSpace::build(std::vector<SubsystemSpec> subsystems,
                                     std::optional<int> excitation_cap) {
  if (subsystems.empty()) {
    throw ParameterError("composite space needs at least one subsystem", "subsystems");
  }
  if (excitation_cap && *excitation_cap < 0) {
    throw ParameterError("excitation cap must be nonnegative", "excitation_cap");
  }
  for (const auto& s : subsystems) {
    if (s.kind == SubsystemKind::Mode && s.n_max < 1) {
      throw ParameterError("mode photon cap n_max must be >= 1", "per_mode_cap");
    }
  }

  CompositeSpace space;
  space.subsystems_ = std::move(subsystems);
  space.cap_ = excitation_cap;
  const int n = space.num_subsystems();

  space.strides_.assign(n, 1);
  std::int64_t full = 1;
  for (int s = n - 1; s >= 0; --s) {
    space.strides_[s] = full;
    full *= space.subsystems_[s].local_dim();
    if (full > kMaxFullDim) {
      throw ParameterError("uncapped dimension too large to enumerate", "subsystems");
    }
  }
  space.full_dim_ = full;
  space.lookup_.assign(static_cast<std::size_t>(full), -1);

  // Odometer over the uncapped lexicographic order (last subsystem fastest).
  std::vector<int> digits(n, 0);
  int weight = 0;
  for (std::int64_t lin = 0; lin < full; ++lin) {
    if (!excitation_cap || weight <= *excitation_cap) {
      space.lookup_[lin] = space.dim_++;
      space.states_.insert(space.states_.end(), digits.begin(), digits.end());
      space.excitation_.push_back(weight);
      space.full_of_.push_back(lin);
    }
    for (int s = n - 1; s >= 0; --s) {
      const auto& spec = space.subsystems_[s];
      weight -= spec.excitation_weight(digits[s]);
      if (++digits[s] < spec.local_dim()) {
        weight += spec.excitation_weight(digits[s]);
        break;
      }
      digits[s] = 0;
    }
  }
  if (space.dim_ == 0) {
    throw ParameterError("truncation leaves an empty basis", "excitation_cap");
  }
  return space;
}

std::span<const int> CompositeSpace::state(int index) const {
  const auto n = static_cast<std::size_t>(num_subsystems());
  return {states_.data() + static_cast<std::size_t>(index) * n, n};
}

std::optional<int> CompositeSpace::index_of(std::span<const int> multi_index) const {
  if (static_cast<int>(multi_index.size()) != num_subsystems()) return std::nullopt;
  std::int64_t lin = 0;
  for (int s = 0; s < num_subsystems(); ++s) {
    const int level = multi_index[s];
    if (level < 0 || level >= subsystems_[s].local_dim()) return std::nullopt;
    lin += level * strides_[s];
  }
  const int pos = lookup_[static_cast<std::size_t>(lin)];
  if (pos < 0) return std::nullopt;
  return pos;
}

bool CompositeSpace::operator==(const CompositeSpace& other) const {
  return subsystems_ == other.subsystems_ && cap_ == other.cap_ && states_ == other.states_;
}

// --- SparseOp ---------------------------------------------------------------

SparseOp::SparseOp(int dim) : matrix_(dim, dim) {}

SparseOp::SparseOp(SparseMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) {
    throw ParameterError("sparse operator must be square");
  }
  purge();
}

SparseOp SparseOp::identity(int dim) {
  SparseMatrix m(dim, dim);
  m.setIdentity();
  return SparseOp(std::move(m));
}

SparseOp SparseOp::from_dense(const DenseMatrix& dense) {
  return SparseOp(SparseMatrix(dense.sparseView(0.0, 0.0)));
}

void SparseOp::purge() {
  matrix_.prune([](Eigen::Index, Eigen::Index, const Complex& v) { return v != Complex(0.0); });
  matrix_.makeCompressed();
}

void SparseOp::check_same_dim(const SparseOp& other) const {
  if (dim() != other.dim()) {
    throw ParameterError("operator dimensions differ: " + std::to_string(dim()) + " vs " +
                         std::to_string(other.dim()));
  }
}

SparseOp SparseOp::adjoint() const { return SparseOp(SparseMatrix(matrix_.adjoint())); }

double SparseOp::max_abs() const {
  double m = 0.0;
  for (Eigen::Index k = 0; k < matrix_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

double SparseOp::hermiticity_error() const { return max_abs_diff(*this, adjoint()); }

SparseOp& SparseOp::operator+=(const SparseOp& other) {
  check_same_dim(other);
  matrix_ += other.matrix_;
  purge();
  return *this;
}

SparseOp& SparseOp::operator-=(const SparseOp& other) {
  check_same_dim(other);
  matrix_ -= other.matrix_;
  purge();
  return *this;
}

SparseOp& SparseOp::operator*=(Complex scalar) {
  matrix_ *= scalar;
  purge();
  return *this;
}

SparseOp operator*(const SparseOp& lhs, const SparseOp& rhs) {
  lhs.check_same_dim(rhs);
  return SparseOp(SparseMatrix(lhs.matrix_ * rhs.matrix_));
}

double max_abs_diff(const SparseOp& a, const SparseOp& b) { return (a - b).max_abs(); }

// --- embedding --------------------------------------------------------------

DenseMatrix local_matrix(const SubsystemSpec& spec, const LocalOp& op) {
  const int d = spec.local_dim();
  DenseMatrix m = DenseMatrix::Zero(d, d);
  switch (op.kind) {
    case LocalOp::Kind::Annihilate:
    case LocalOp::Kind::Create:
      if (spec.kind != SubsystemKind::Mode) {
        throw ParameterError("ladder operators are defined only on modes", "subsystem");
      }
      for (int n = 1; n < d; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
      if (op.kind == LocalOp::Kind::Create) m.transposeInPlace();
      return m;
    case LocalOp::Kind::Transition:
    case LocalOp::Kind::Project:
      if (op.to < 0 || op.to >= d || op.from < 0 || op.from >= d) {
        throw ParameterError("level out of range for subsystem", "level");
      }
      m(op.to, op.from) = 1.0;
      return m;
  }
  return m;
}

SparseOp embed_product(const CompositeSpace& space, std::span<const Factor> factors) {
  const int n = space.num_subsystems();
  std::vector<char> seen(n, 0);
  for (const auto& f : factors) {
    if (f.subsystem < 0 || f.subsystem >= n) {
      throw ParameterError("factor subsystem index out of range", "subsystem");
    }
    if (seen[f.subsystem]++) {
      throw ParameterError("duplicate subsystem in product", "subsystem");
    }
    const int d = space.subsystem(f.subsystem).local_dim();
    if (f.local.rows() != d || f.local.cols() != d) {
      throw ParameterError("local factor has wrong dimension", "subsystem");
    }
  }

  std::vector<Eigen::Triplet<Complex>> triplets;
  // Partial products while walking the Cartesian product of factor columns.
  struct Branch {
    std::vector<int> levels;
    Complex amplitude;
  };
  std::vector<Branch> branches, next;
  for (int col = 0; col < space.dim(); ++col) {
    const auto source = space.state(col);
    branches.assign(1, Branch{{source.begin(), source.end()}, Complex(1.0)});
    for (const auto& f : factors) {
      next.clear();
      const int from = source[f.subsystem];
      for (const auto& b : branches) {
        for (int row = 0; row < f.local.rows(); ++row) {
          const Complex v = f.local(row, from);
          if (v == Complex(0.0)) continue;
          Branch nb = b;
          nb.levels[f.subsystem] = row;
          nb.amplitude *= v;
          next.push_back(std::move(nb));
        }
      }
      branches.swap(next);
      if (branches.empty()) break;
    }
    for (const auto& b : branches) {
      if (auto row = space.index_of(b.levels)) triplets.emplace_back(*row, col, b.amplitude);
    }
  }
  SparseMatrix m(space.dim(), space.dim());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return SparseOp(std::move(m));
}

SparseOp local_operator(const CompositeSpace& space, int subsystem, const LocalOp& op) {
  if (subsystem < 0 || subsystem >= space.num_subsystems()) {
    throw ParameterError("subsystem index out of range", "subsystem");
  }
  const Factor f{subsystem, local_matrix(space.subsystem(subsystem), op)};
  return embed_product(space, std::span<const Factor>(&f, 1));
}

}  // namespace dissipent
