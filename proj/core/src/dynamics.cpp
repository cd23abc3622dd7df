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

#include "dissipent/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/SparseLU>
#ifdef DISSIPENT_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include "dissipent/errors.hpp"

namespace dissipent {

namespace {

constexpr double kTraceAbort = 1e-4;

#ifdef DISSIPENT_HAVE_UMFPACK
using SteadyLU = Eigen::UmfPackLU<SparseMatrix>;
#else
using SteadyLU = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;
#endif

double max_abs(const DenseMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void hermitize(DenseMatrix& rho) {
  rho = (0.5 * (rho + rho.adjoint())).eval();
}

Complex trace_of(const DenseMatrix& rho) { return rho.trace(); }

void check_trace_drift(const DenseMatrix& rho, double t) {
  const double drift = std::abs(trace_of(rho) - 1.0);
  if (!(drift <= kTraceAbort)) {
    std::ostringstream os;
    os << "step instability: trace drift " << drift << " at t = " << t
       << " (reduce dt or use the adaptive integrator)";
    throw NumericalError(os.str());
  }
}

// Appends kron(a, b) scaled by `scale` as triplets (a, b square of size n).
void append_kron(const SparseMatrix& a, const SparseMatrix& b, Complex scale, Eigen::Index n,
                 std::vector<Eigen::Triplet<Complex>>& out) {
  for (Eigen::Index ka = 0; ka < a.outerSize(); ++ka) {
    for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia) {
      for (Eigen::Index kb = 0; kb < b.outerSize(); ++kb) {
        for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib) {
          out.emplace_back(ia.row() * n + ib.row(), ia.col() * n + ib.col(),
                           scale * ia.value() * ib.value());
        }
      }
    }
  }
}

SparseMatrix sparse_identity(Eigen::Index n) {
  SparseMatrix id(n, n);
  id.setIdentity();
  return id;
}

SparseMatrix decay_generator(const LindbladGenerator& gen) {
  SparseMatrix k = Complex(0.0, -1.0) * gen.hamiltonian.matrix();
  for (const auto& l : gen.collapse) {
    k -= 0.5 * SparseMatrix(l.matrix().adjoint() * l.matrix());
  }
  k.prune(Complex(0.0), 0.0);
  return k;
}

// Dormand-Prince 5(4) tableau.
struct DormandPrince {
  static constexpr double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static constexpr double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static constexpr double e[7] = {71.0 / 57600,     0.0,          -71.0 / 16695, 71.0 / 1920,
                                  -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
};

// Adaptive integrator state shared by evolve() and the long-time steady solver.
class AdaptiveStepper {
 public:
  AdaptiveStepper(const GeneratorKernel& kernel, double rtol, double atol, double h0)
      : kernel_(kernel), rtol_(rtol), atol_(atol), h_(h0) {
    for (auto& k : k_) k.resize(kernel.dim(), kernel.dim());
  }

  // Advances rho from t to t_end; returns accepted step count.
  long advance(DenseMatrix& rho, double t, double t_end) {
    long accepted = 0;
    while (t < t_end) {
      bool clipped = h_ >= t_end - t;
      double h = clipped ? t_end - t : h_;
      kernel_.apply(rho, k_[0]);
      for (;;) {
        for (int s = 1; s < 7; ++s) {
          stage_ = rho;
          for (int j = 0; j < s; ++j) {
            if (DormandPrince::a[s][j] != 0.0) stage_ += (h * DormandPrince::a[s][j]) * k_[j];
          }
          if (s == 6) next_ = stage_;
          kernel_.apply(stage_, k_[s]);
        }
        err_ = (h * DormandPrince::e[0]) * k_[0];
        for (int j = 2; j < 7; ++j) err_ += (h * DormandPrince::e[j]) * k_[j];
        double norm = 0.0;
        for (Eigen::Index i = 0; i < rho.size(); ++i) {
          const double scale =
              atol_ + rtol_ * std::max(std::abs(rho.data()[i]), std::abs(next_.data()[i]));
          norm = std::max(norm, std::abs(err_.data()[i]) / scale);
        }
        const double factor =
            norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
        if (norm <= 1.0) {
          t = clipped ? t_end : t + h;
          rho = next_;
          hermitize(rho);
          check_trace_drift(rho, t);
          if (!clipped || factor < 1.0) h_ = h * factor;
          ++accepted;
          break;
        }
        h *= factor;
        clipped = false;
        if (h < 1e-12) throw NumericalError("adaptive integrator step size underflow");
        h_ = h;
      }
    }
    return accepted;
  }

 private:
  const GeneratorKernel& kernel_;
  double rtol_, atol_, h_;
  DenseMatrix k_[7];
  DenseMatrix stage_, next_, err_;
};

class Rk4Stepper {
 public:
  explicit Rk4Stepper(const GeneratorKernel& kernel) : kernel_(kernel) {}

  void step(DenseMatrix& rho, double h) {
    kernel_.apply(rho, k1_);
    tmp_ = rho + (0.5 * h) * k1_;
    kernel_.apply(tmp_, k2_);
    tmp_ = rho + (0.5 * h) * k2_;
    kernel_.apply(tmp_, k3_);
    tmp_ = rho + h * k3_;
    kernel_.apply(tmp_, k4_);
    rho += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    hermitize(rho);
  }

 private:
  const GeneratorKernel& kernel_;
  DenseMatrix k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace

// --- generator --------------------------------------------------------------

void LindbladGenerator::validate() const {
  const int n = dim();
  if (n <= 0) throw ParameterError("generator has an empty Hamiltonian", "hamiltonian");
  for (const auto& l : collapse) {
    if (l.dim() != n) throw ParameterError("collapse operator dimension mismatch", "collapse");
  }
  const double herm = hamiltonian.hermiticity_error();
  if (herm > 1e-12) {
    std::ostringstream os;
    os << "Hamiltonian is not Hermitian (max |H - H^dag| = " << herm << ")";
    throw ParameterError(os.str(), "hamiltonian");
  }
}

LindbladGenerator full_generator(const PhysicalParams& p, const CompositeSpace& space,
                                 const ModeLayout& layout) {
  const auto parts = build_hamiltonian_parts(p, space, layout);
  LindbladGenerator gen{parts.total(), operators_of(build_collapse_ops(p, space, layout))};
  gen.validate();
  return gen;
}

// --- density matrices -------------------------------------------------------

DensityMatrix DensityMatrix::pure(const DenseVector& psi) {
  return DensityMatrix(psi * psi.adjoint());
}

double DensityMatrix::hermiticity_error() const { return max_abs(rho_ - rho_.adjoint()); }

double DensityMatrix::trace_error() const { return std::abs(rho_.trace() - 1.0); }

double DensityMatrix::min_eigenvalue() const {
  const DenseMatrix h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::check(bool positivity) const {
  std::ostringstream os;
  if (const double h = hermiticity_error(); h > 1e-10) {
    os << "density matrix not Hermitian (" << h << ")";
    throw InvariantViolation(os.str());
  }
  if (const double t = trace_error(); t > 1e-8) {
    os << "density matrix trace error " << t;
    throw InvariantViolation(os.str());
  }
  if (positivity) {
    if (const double m = min_eigenvalue(); m < -1e-8) {
      os << "density matrix has negative eigenvalue " << m;
      throw InvariantViolation(os.str());
    }
  }
}

double trace_distance(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix d = a - b;
  hermitize(d);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(d, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

DenseVector haar_random_state(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseVector v(dim);
  for (int i = 0; i < dim; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v[i] = Complex(re, im);
  }
  return v / v.norm();
}

// --- superoperator ----------------------------------------------------------

SparseMatrix liouvillian_matrix(const LindbladGenerator& gen, Eigen::Index max_columns) {
  gen.validate();
  const Eigen::Index n = gen.dim();
  if (n * n > max_columns) {
    std::ostringstream os;
    os << "superoperator would have " << n * n << " columns (ceiling " << max_columns
       << "); use the matrix-free path";
    throw ParameterError(os.str(), "max_columns");
  }
  const SparseMatrix k = decay_generator(gen);
  const SparseMatrix id = sparse_identity(n);
  std::vector<Eigen::Triplet<Complex>> trips;
  // vec(A rho B) = (B^T kron A) vec(rho)
  append_kron(id, k, 1.0, n, trips);                              // K rho
  append_kron(SparseMatrix(k.conjugate()), id, 1.0, n, trips);    // rho K^dag
  for (const auto& l : gen.collapse) {
    append_kron(SparseMatrix(l.matrix().conjugate()), l.matrix(), 1.0, n, trips);  // L rho L^dag
  }
  SparseMatrix out(n * n, n * n);
  out.setFromTriplets(trips.begin(), trips.end());
  out.prune(Complex(0.0), 0.0);
  out.makeCompressed();
  return out;
}

DenseMatrix apply_generator(const LindbladGenerator& gen, const DenseMatrix& rho) {
  const SparseMatrix k = decay_generator(gen);
  DenseMatrix out = k * rho;
  out += rho * SparseMatrix(k.adjoint());
  for (const auto& l : gen.collapse) {
    const DenseMatrix lr = l.matrix() * rho;
    out += lr * SparseMatrix(l.matrix().adjoint());
  }
  return out;
}

GeneratorKernel::GeneratorKernel(const LindbladGenerator& gen) : k_conj_(decay_generator(gen).conjugate()) {
  gen.validate();
  k_conj_.makeCompressed();
  for (const auto& l : gen.collapse) {
    if (l.is_zero()) continue;
    std::vector<Entry> entries;
    const SparseMatrix& m = l.matrix();
    for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
        if (it.value() != Complex(0.0)) {
          entries.push_back({static_cast<int>(it.row()), static_cast<int>(it.col()), it.value()});
        }
      }
    }
    collapse_.push_back(std::move(entries));
  }
  scratch_.resize(gen.dim(), gen.dim());
}

void GeneratorKernel::apply(const DenseMatrix& rho, DenseMatrix& out) const {
  // W(:, i) = sum_k conj(K)(i, k) rho(:, k), i.e. W = rho K^dag, and K rho = W^dag.
  scratch_.setZero();
  const auto* outer = k_conj_.outerIndexPtr();
  const auto* inner = k_conj_.innerIndexPtr();
  const Complex* values = k_conj_.valuePtr();
  for (Eigen::Index i = 0; i < k_conj_.rows(); ++i) {
    for (auto p = outer[i]; p < outer[i + 1]; ++p) {
      scratch_.col(i).noalias() += values[p] * rho.col(inner[p]);
    }
  }
  out = scratch_ + scratch_.adjoint();

  // L rho L^dag entry by entry: out(i, j) += a_ik conj(b_jl) rho(k, l).
  for (const auto& entries : collapse_) {
    for (const auto& b : entries) {
      const double br = b.value.real();
      const double bi = -b.value.imag();
      const Complex* rho_col = rho.data() + static_cast<Eigen::Index>(b.col) * rho.rows();
      Complex* out_col = out.data() + static_cast<Eigen::Index>(b.row) * out.rows();
      for (const auto& a : entries) {
        const Complex r = rho_col[a.col];
        const double ar = a.value.real() * br - a.value.imag() * bi;
        const double ai = a.value.real() * bi + a.value.imag() * br;
        out_col[a.row] += Complex(ar * r.real() - ai * r.imag(), ar * r.imag() + ai * r.real());
      }
    }
  }
}

// --- populations ------------------------------------------------------------

PopulationProbe::PopulationProbe(const CompositeSpace& space, const ModeLayout& layout)
    : dim_(space.dim()) {
  layout.check(space);
  std::map<std::vector<int>, int> group_of;
  const auto fields = layout.field_modes();
  for (int i = 0; i < space.dim(); ++i) {
    const auto s = space.state(i);
    std::vector<int> key;
    key.reserve(fields.size());
    for (int f : fields) key.push_back(s[f]);
    auto [it, inserted] = group_of.try_emplace(std::move(key), static_cast<int>(groups_.size()));
    if (inserted) groups_.emplace_back();
    groups_[it->second].emplace_back(i, 3 * s[layout.atom1] + s[layout.atom2]);
  }
}

PopulationProbe PopulationProbe::ground_manifold() {
  PopulationProbe p;
  p.manifold_ = true;
  p.dim_ = 4;
  return p;
}

DenseMatrix PopulationProbe::reduced_atoms(const DenseMatrix& rho) const {
  if (rho.rows() != dim_) throw ParameterError("density matrix does not match probe space");
  if (manifold_) return rho;
  DenseMatrix r = DenseMatrix::Zero(9, 9);
  for (const auto& g : groups_) {
    for (const auto& [i, ai] : g) {
      for (const auto& [j, aj] : g) r(ai, aj) += rho(i, j);
    }
  }
  return r;
}

AtomicPopulations PopulationProbe::operator()(const DenseMatrix& rho) const {
  AtomicPopulations out;
  if (manifold_) {
    if (rho.rows() != 4) throw ParameterError("manifold probe expects a 4x4 matrix");
    out.p00 = rho(0, 0).real();
    out.ps = rho(1, 1).real();
    out.pt = rho(2, 2).real();
    out.p11 = rho(3, 3).real();
  } else {
    const DenseMatrix r = reduced_atoms(rho);
    // |ab> -> 3a + b; |10> = 3, |01> = 1.
    out.p00 = r(0, 0).real();
    out.p11 = r(4, 4).real();
    const Complex c = r(3, 1);
    const double diag = 0.5 * (r(3, 3).real() + r(1, 1).real());
    out.ps = diag - c.real();
    out.pt = diag + c.real();
  }
  out.leak = 1.0 - (out.p00 + out.ps + out.pt + out.p11);
  return out;
}

AtomicPopulations atomic_populations(const DenseMatrix& rho, const CompositeSpace& space,
                                     const ModeLayout& layout) {
  return PopulationProbe(space, layout)(rho);
}

// --- time evolution ---------------------------------------------------------

void Trajectory::write_csv(std::ostream& os) const {
  os << "t,P00,PS,PT,P11,leak,trace_err\n";
  std::ostringstream line;
  line << std::setprecision(12);
  for (const auto& r : records) {
    line.str({});
    line << r.t << ',' << r.pops.p00 << ',' << r.pops.ps << ',' << r.pops.pt << ','
         << r.pops.p11 << ',' << r.pops.leak << ',' << r.trace_error << '\n';
    os << line.str();
  }
}

Trajectory evolve(const LindbladGenerator& gen, const DensityMatrix& rho0, double t_final,
                  const EvolveOptions& options, const PopulationProbe& probe) {
  if (!(t_final > 0.0)) throw ParameterError("t_final must be > 0", "t_final");
  if (!(options.dt > 0.0)) throw ParameterError("dt must be > 0", "dt");
  if (options.record_stride < 1) throw ParameterError("record_stride must be >= 1", "record_stride");
  if (rho0.dim() != gen.dim()) throw ParameterError("initial state has the wrong dimension", "rho0");
  rho0.check();

  const GeneratorKernel kernel(gen);
  DenseMatrix rho = rho0.matrix();
  Trajectory traj;

  auto record = [&](double t) {
    TrajectoryRecord r;
    r.t = t;
    r.pops = probe(rho);
    r.trace_error = std::abs(rho.trace() - 1.0);
    r.min_eigenvalue = options.track_positivity ? DensityMatrix(rho).min_eigenvalue()
                                                : std::numeric_limits<double>::quiet_NaN();
    traj.records.push_back(r);
  };
  record(0.0);

  const long nominal = std::max(1L, std::lround(t_final / options.dt));
  if (options.method == IntegratorMethod::Rk4) {
    const double h = t_final / static_cast<double>(nominal);
    Rk4Stepper stepper(kernel);
    for (long s = 1; s <= nominal; ++s) {
      stepper.step(rho, h);
      if (s % options.record_stride == 0 || s == nominal) {
        check_trace_drift(rho, s * h);
        record(s == nominal ? t_final : s * h);
      }
    }
    traj.steps = nominal;
  } else {
    AdaptiveStepper stepper(kernel, options.rtol, options.atol, options.dt);
    const double interval = options.dt * options.record_stride;
    double t = 0.0;
    long k = 0;
    while (t < t_final) {
      const double next = std::min(t_final, (++k) * interval);
      traj.steps += stepper.advance(rho, t, next);
      t = next;
      record(t);
    }
  }
  traj.final_state = DensityMatrix(rho);
  return traj;
}

// --- steady state -----------------------------------------------------------

std::string to_string(SteadyMethod m) {
  return m == SteadyMethod::NullSpace ? "null_space" : "long_time";
}

namespace {

SteadyStateResult finish_steady(const LindbladGenerator& gen, DenseMatrix rho, SteadyMethod method) {
  hermitize(rho);
  rho /= rho.trace();
  SteadyStateResult out;
  out.residual = max_abs(apply_generator(gen, rho));
  out.rho = DensityMatrix(std::move(rho));
  out.method = method;
  const double limit = method == SteadyMethod::NullSpace ? 1e-8 : 1e-6;
  if (!(out.residual <= limit)) {
    std::ostringstream os;
    os << "steady-state residual " << out.residual << " exceeds " << limit;
    throw NumericalError(os.str());
  }
  out.rho.check(true);
  return out;
}

SteadyStateResult null_space_solve(const LindbladGenerator& gen, const SparseMatrix& liou) {
  const Eigen::Index n = gen.dim();
  const Eigen::Index nn = n * n;
  // Replace the equation for rho(0,0) by the trace condition.
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(liou.nonZeros() + n));
  for (Eigen::Index k = 0; k < liou.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(liou, k); it; ++it) {
      if (it.row() != 0) trips.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) trips.emplace_back(0, i * (n + 1), 1.0);
  SparseMatrix m(nn, nn);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();

  SteadyLU lu;
  lu.compute(m);
  if (lu.info() != Eigen::Success) {
    throw NumericalError("degenerate steady manifold: trace-constrained Liouvillian is singular");
  }

  // Inverse iteration on the factorization estimates 1/sigma_min; a second
  // stationary state shows up as an (almost) exactly singular system.
  double norm1 = 0.0;
  {
    Eigen::VectorXd colsum = Eigen::VectorXd::Zero(nn);
    for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) colsum[k] += std::abs(it.value());
    }
    norm1 = colsum.maxCoeff();
  }
  DenseVector x = haar_random_state(static_cast<int>(nn), 0x5eed);
  double growth = 0.0;
  for (int it = 0; it < 4; ++it) {
    DenseVector y = lu.solve(x);
    growth = y.norm();
    if (!std::isfinite(growth)) break;
    x = y / growth;
  }
  if (!std::isfinite(growth) || growth * norm1 > 1e12) {
    std::ostringstream os;
    os << "degenerate steady manifold: condition estimate " << growth * norm1
       << " exceeds 1e12 (null space of the generator has dimension > 1)";
    throw NumericalError(os.str());
  }

  DenseVector rhs = DenseVector::Zero(nn);
  rhs[0] = 1.0;
  const DenseVector v = lu.solve(rhs);
  DenseMatrix rho = Eigen::Map<const DenseMatrix>(v.data(), n, n);
  return finish_steady(gen, std::move(rho), SteadyMethod::NullSpace);
}

SteadyStateResult long_time_solve(const LindbladGenerator& gen, const SteadyStateOptions& o) {
  const int n = gen.dim();
  const GeneratorKernel kernel(gen);
  DenseMatrix rho = DenseMatrix::Identity(n, n) / static_cast<double>(n);
  AdaptiveStepper stepper(kernel, o.rtol, o.atol, 0.01);
  double t = 0.0;
  while (t < o.max_time) {
    const DenseMatrix before = rho;
    stepper.advance(rho, t, t + o.window);
    t += o.window;
    if (max_abs(rho - before) / o.window <= o.tol_per_time) {
      return finish_steady(gen, std::move(rho), SteadyMethod::LongTime);
    }
  }
  std::ostringstream os;
  os << "long-time steady-state iteration did not settle by t = " << o.max_time;
  throw NumericalError(os.str());
}

}  // namespace

SteadyStateResult steady_state(const LindbladGenerator& gen, const SteadyStateOptions& options) {
  gen.validate();
  if (gen.collapse.empty()) {
    throw ParameterError("steady state needs at least one collapse operator", "collapse");
  }
  const Eigen::Index n = gen.dim();
  if (!options.force_long_time && n * n <= options.max_columns) {
    return null_space_solve(gen, liouvillian_matrix(gen, options.max_columns));
  }
  return long_time_solve(gen, options);
}

}  // namespace dissipent
