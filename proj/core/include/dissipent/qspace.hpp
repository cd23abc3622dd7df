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

// Truncated tensor-product Hilbert spaces of three-level atoms and bosonic
// modes, and a complex sparse-operator algebra on them.

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dissipent {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

enum class SubsystemKind { Atom3, Mode };

/// One tensor factor. Atoms carry levels |0>, |1>, |2> where only |2> counts
/// as an excitation; a mode carries Fock states 0..n_max, each photon counting
/// once.
struct SubsystemSpec {
  SubsystemKind kind = SubsystemKind::Atom3;
  int n_max = 0;

  static SubsystemSpec atom3() { return {SubsystemKind::Atom3, 0}; }
  static SubsystemSpec mode(int n_max) { return {SubsystemKind::Mode, n_max}; }

  int local_dim() const { return kind == SubsystemKind::Atom3 ? 3 : n_max + 1; }
  int excitation_weight(int level) const {
    return kind == SubsystemKind::Atom3 ? (level == 2 ? 1 : 0) : level;
  }
  bool operator==(const SubsystemSpec&) const = default;
};

/// Basis of retained multi-indices, ordered lexicographically with subsystem 0
/// varying slowest. With an excitation cap only multi-indices whose summed
/// excitation weight is <= cap are kept.
class CompositeSpace {
 public:
  /// Throws ParameterError on an empty list, a negative cap or a mode with
  /// n_max < 1.
  static CompositeSpace build(std::vector<SubsystemSpec> subsystems,
                              std::optional<int> excitation_cap = std::nullopt);

  int dim() const { return dim_; }
  int num_subsystems() const { return static_cast<int>(subsystems_.size()); }
  const std::vector<SubsystemSpec>& subsystems() const { return subsystems_; }
  const SubsystemSpec& subsystem(int index) const { return subsystems_.at(index); }
  std::optional<int> excitation_cap() const { return cap_; }

  /// Product of local dimensions (the uncapped dimension).
  std::int64_t full_dim() const { return full_dim_; }

  std::span<const int> state(int index) const;
  int excitation(int index) const { return excitation_[index]; }

  /// Position of a multi-index in the basis, or nullopt when it was truncated
  /// away (or is out of range).
  std::optional<int> index_of(std::span<const int> multi_index) const;

  /// Position of a basis state in the uncapped lexicographic enumeration.
  std::int64_t full_index(int index) const { return full_of_[index]; }

  bool operator==(const CompositeSpace& other) const;

 private:
  std::vector<SubsystemSpec> subsystems_;
  std::optional<int> cap_;
  int dim_ = 0;
  std::int64_t full_dim_ = 0;
  std::vector<int> states_;            // dim_ x num_subsystems, row-major
  std::vector<int> excitation_;
  std::vector<std::int64_t> full_of_;  // basis position -> uncapped index
  std::vector<int> lookup_;            // uncapped index -> basis position or -1
  std::vector<std::int64_t> strides_;
};

/// Complex sparse matrix on a space of fixed dimension. Explicit zeros are
/// never stored: every arithmetic result is pruned at exact zero.
class SparseOp {
 public:
  SparseOp() = default;
  explicit SparseOp(int dim);
  explicit SparseOp(SparseMatrix matrix);

  static SparseOp identity(int dim);
  static SparseOp from_dense(const DenseMatrix& dense);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const SparseMatrix& matrix() const { return matrix_; }
  Eigen::Index nonzeros() const { return matrix_.nonZeros(); }
  bool is_zero() const { return matrix_.nonZeros() == 0; }

  Complex coeff(int row, int col) const { return matrix_.coeff(row, col); }
  DenseMatrix to_dense() const { return DenseMatrix(matrix_); }

  SparseOp adjoint() const;
  /// Max-norm of (this - this^dagger).
  double hermiticity_error() const;
  double max_abs() const;

  SparseOp& operator+=(const SparseOp& other);
  SparseOp& operator-=(const SparseOp& other);
  SparseOp& operator*=(Complex scalar);

  friend SparseOp operator+(SparseOp lhs, const SparseOp& rhs) { return lhs += rhs; }
  friend SparseOp operator-(SparseOp lhs, const SparseOp& rhs) { return lhs -= rhs; }
  friend SparseOp operator*(SparseOp op, Complex scalar) { return op *= scalar; }
  friend SparseOp operator*(Complex scalar, SparseOp op) { return op *= scalar; }
  friend SparseOp operator*(const SparseOp& lhs, const SparseOp& rhs);

 private:
  void check_same_dim(const SparseOp& other) const;
  void purge();

  SparseMatrix matrix_;
};

double max_abs_diff(const SparseOp& a, const SparseOp& b);

/// Local single-subsystem operator selector.
struct LocalOp {
  enum class Kind { Annihilate, Create, Transition, Project };
  Kind kind = Kind::Project;
  int to = 0;    // |to><from| for transitions, |to><to| for projectors
  int from = 0;

  static LocalOp annihilate() { return {Kind::Annihilate, 0, 0}; }
  static LocalOp create() { return {Kind::Create, 0, 0}; }
  static LocalOp transition(int to, int from) { return {Kind::Transition, to, from}; }
  static LocalOp project(int level) { return {Kind::Project, level, level}; }
};

/// Dense local matrix for `op` on `spec`; throws ParameterError for ladder
/// operators on atoms or out-of-range levels.
DenseMatrix local_matrix(const SubsystemSpec& spec, const LocalOp& op);

struct Factor {
  int subsystem = 0;
  DenseMatrix local;
};

/// Product of local factors (at most one per subsystem) embedded in `space`.
/// On a capped space this is P M P^T with M the uncapped embedding: matrix
/// elements with source or target outside the retained basis are dropped.
SparseOp embed_product(const CompositeSpace& space, std::span<const Factor> factors);

SparseOp local_operator(const CompositeSpace& space, int subsystem, const LocalOp& op);

}  // namespace dissipent
