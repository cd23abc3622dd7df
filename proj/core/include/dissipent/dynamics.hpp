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

// Lindblad generators: superoperator materialization, time integration,
// steady states and reduced atomic observables.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dissipent/model.hpp"
#include "dissipent/qspace.hpp"

namespace dissipent {

/// d rho/dt = -i[H, rho] + sum_x (L rho L^dag - 1/2 {L^dag L, rho}).
struct LindbladGenerator {
  SparseOp hamiltonian;
  std::vector<SparseOp> collapse;

  int dim() const { return hamiltonian.dim(); }
  /// Throws ParameterError on mismatched dimensions or a non-Hermitian
  /// Hamiltonian (tolerance 1e-12).
  void validate() const;
};

/// Generator of the full model: H = H0 + Hg + V+ + V-, lab-basis collapse set.
LindbladGenerator full_generator(const PhysicalParams& p, const CompositeSpace& space,
                                 const ModeLayout& layout);

class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(DenseMatrix rho) : rho_(std::move(rho)) {}
  static DensityMatrix pure(const DenseVector& psi);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const DenseMatrix& matrix() const { return rho_; }

  double hermiticity_error() const;
  double trace_error() const;
  double min_eigenvalue() const;

  /// Throws InvariantViolation when Hermiticity (1e-10), unit trace (1e-8) or,
  /// if requested, positivity (-1e-8) fails.
  void check(bool positivity = false) const;

 private:
  DenseMatrix rho_;
};

/// 1/2 ||a - b||_1.
double trace_distance(const DenseMatrix& a, const DenseMatrix& b);

/// Normalized complex-Gaussian vector, i.e. a Haar-random pure state.
DenseVector haar_random_state(int dim, std::uint64_t seed);

inline constexpr Eigen::Index kDefaultSuperoperatorCeiling = 40'000;

/// Column-stacked superoperator, vec(rho)[i + j*dim] = rho(i, j). Throws
/// ParameterError when dim^2 exceeds `max_columns`; callers then use the
/// matrix-free path.
SparseMatrix liouvillian_matrix(const LindbladGenerator& gen,
                                Eigen::Index max_columns = kDefaultSuperoperatorCeiling);

/// Matrix-free application of the generator to an arbitrary square matrix.
DenseMatrix apply_generator(const LindbladGenerator& gen, const DenseMatrix& rho);

/// Pre-assembled right-hand side for Hermitian inputs. With K = -iH - 1/2 sum L^dag L
/// it evaluates W + W^dag + sum L rho L^dag where W = rho K^dag, using rho = rho^dag.
class GeneratorKernel {
 public:
  explicit GeneratorKernel(const LindbladGenerator& gen);
  void apply(const DenseMatrix& rho, DenseMatrix& out) const;
  int dim() const { return static_cast<int>(k_conj_.rows()); }

 private:
  struct Entry {
    int row;
    int col;
    Complex value;
  };

  Eigen::SparseMatrix<Complex, Eigen::RowMajor> k_conj_;
  std::vector<std::vector<Entry>> collapse_;
  mutable DenseMatrix scratch_;
};

/// Populations of the two-atom ground manifold after tracing out the fields.
struct AtomicPopulations {
  double p00 = 0.0;
  double ps = 0.0;
  double pt = 0.0;
  double p11 = 0.0;
  double leak = 0.0;  // 1 - (p00 + ps + pt + p11)
};

/// Computes AtomicPopulations from a density matrix. Built either on a model
/// space (fields traced out) or on the 4-dim manifold {|00>, |S>, |T>, |11>}.
class PopulationProbe {
 public:
  PopulationProbe(const CompositeSpace& space, const ModeLayout& layout);
  static PopulationProbe ground_manifold();

  AtomicPopulations operator()(const DenseMatrix& rho) const;
  /// Reduced 9x9 two-atom density matrix, atom 1 slowest (manifold probes
  /// return the 4x4 matrix itself).
  DenseMatrix reduced_atoms(const DenseMatrix& rho) const;

 private:
  PopulationProbe() = default;
  bool manifold_ = false;
  int dim_ = 0;
  // basis states grouped by field configuration; entries are (basis index, atom pair index)
  std::vector<std::vector<std::pair<int, int>>> groups_;
};

AtomicPopulations atomic_populations(const DenseMatrix& rho, const CompositeSpace& space,
                                     const ModeLayout& layout);

enum class IntegratorMethod { Rk4, Adaptive };

struct EvolveOptions {
  double dt = 0.02;
  IntegratorMethod method = IntegratorMethod::Rk4;
  int record_stride = 500;  // record every `record_stride` nominal steps of size dt
  double rtol = 1e-8;       // adaptive only
  double atol = 1e-10;      // adaptive only
  bool track_positivity = false;
};

struct TrajectoryRecord {
  double t = 0.0;
  AtomicPopulations pops;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;  // NaN when positivity is not tracked
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  DensityMatrix final_state;
  long steps = 0;

  /// Header t,P00,PS,PT,P11,leak,trace_err; 12 significant digits.
  void write_csv(std::ostream& os) const;
};

/// Integrates the master equation from rho0 to t_final. The state is
/// re-Hermitized after every step; a trace drift above 1e-4 aborts with
/// NumericalError.
Trajectory evolve(const LindbladGenerator& gen, const DensityMatrix& rho0, double t_final,
                  const EvolveOptions& options, const PopulationProbe& probe);

enum class SteadyMethod { NullSpace, LongTime };

struct SteadyStateOptions {
  Eigen::Index max_columns = kDefaultSuperoperatorCeiling;
  bool force_long_time = false;
  double window = 50.0;          // long-time comparison window
  double tol_per_time = 1e-9;    // ||rho(t + window) - rho(t)||_max / window
  double max_time = 5e6;
  double rtol = 1e-10;
  double atol = 1e-13;
};

struct SteadyStateResult {
  DensityMatrix rho;
  double residual = 0.0;  // ||L(rho)||_max
  SteadyMethod method = SteadyMethod::NullSpace;
};

/// Stationary state with unit trace. Throws NumericalError when the steady
/// manifold is degenerate or the long-time iteration does not settle.
SteadyStateResult steady_state(const LindbladGenerator& gen, const SteadyStateOptions& options = {});

std::string to_string(SteadyMethod m);

}  // namespace dissipent
