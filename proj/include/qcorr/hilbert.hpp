#pragma once

// Dense states, partial traces and von Neumann entropies over small
// multipartite Hilbert spaces.
//
// Index convention: subsystem 0 is the most significant factor of a basis
// index (row-major), i.e. |i0 i1 ... i_{N-1}> sits at
// i0*d1*...*d_{N-1} + ... + i_{N-1}.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "qcorr/error.hpp"

namespace qcorr {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Dims = std::vector<int>;

inline constexpr double kNormTol = 1e-12;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kEigenTol = 1e-9;
inline constexpr int kMaxDim = 4;

inline int total_dim(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

inline std::string to_string(const Dims& dims) {
  std::string out = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) out += (i ? "," : "") + std::to_string(dims[i]);
  return out + "]";
}

/// Strictly increasing list of subsystem labels.
class SubsystemSet {
 public:
  SubsystemSet() = default;
  SubsystemSet(std::initializer_list<int> labels) : SubsystemSet(std::vector<int>(labels)) {}
  explicit SubsystemSet(std::vector<int> labels) : indices_(std::move(labels)) {
    std::sort(indices_.begin(), indices_.end());
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
      throw InvalidPartition("duplicate subsystem label in " + to_string());
    if (!indices_.empty() && indices_.front() < 0) throw InvalidPartition("negative subsystem label");
  }

  static SubsystemSet from_mask(std::uint64_t mask) {
    std::vector<int> out;
    for (int i = 0; i < 64; ++i)
      if (mask >> i & 1U) out.push_back(i);
    return SubsystemSet(std::move(out));
  }
  /// All labels 0..n-1.
  static SubsystemSet range(int n) {
    std::vector<int> out(static_cast<std::size_t>(n));
    std::iota(out.begin(), out.end(), 0);
    return SubsystemSet(std::move(out));
  }

  const std::vector<int>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  int operator[](std::size_t i) const { return indices_[i]; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }
  int max() const { return indices_.empty() ? -1 : indices_.back(); }

  bool contains(int label) const { return std::binary_search(indices_.begin(), indices_.end(), label); }

  std::uint64_t mask() const {
    std::uint64_t m = 0;
    for (int i : indices_) m |= std::uint64_t{1} << i;
    return m;
  }

  bool disjoint(const SubsystemSet& other) const { return (mask() & other.mask()) == 0; }
  SubsystemSet operator|(const SubsystemSet& other) const { return from_mask(mask() | other.mask()); }
  SubsystemSet operator&(const SubsystemSet& other) const { return from_mask(mask() & other.mask()); }
  SubsystemSet complement(int n) const { return from_mask(range(n).mask() & ~mask()); }

  /// Position of each label inside `within`, e.g. {2,4} within {1,2,4} -> {1,2}.
  SubsystemSet relative_to(const SubsystemSet& within) const {
    std::vector<int> out;
    out.reserve(indices_.size());
    for (int label : indices_) {
      auto it = std::lower_bound(within.begin(), within.end(), label);
      if (it == within.end() || *it != label)
        throw InvalidPartition(to_string() + " is not contained in " + within.to_string());
      out.push_back(static_cast<int>(it - within.begin()));
    }
    return SubsystemSet(std::move(out));
  }

  std::string to_string() const {
    std::string out = "{";
    for (std::size_t i = 0; i < indices_.size(); ++i) out += (i ? "," : "") + std::to_string(indices_[i]);
    return out + "}";
  }

  friend bool operator==(const SubsystemSet&, const SubsystemSet&) = default;
  friend auto operator<=>(const SubsystemSet&, const SubsystemSet&) = default;

 private:
  std::vector<int> indices_;
};

namespace detail {

inline void check_dims(const Dims& dims) {
  if (dims.empty()) throw DimensionError("no subsystems");
  for (int d : dims)
    if (d < 2 || d > kMaxDim) throw DimensionError("subsystem dimension " + std::to_string(d) + " outside [2, 4]");
}

inline void check_within(const SubsystemSet& set, std::size_t n) {
  if (set.max() >= static_cast<int>(n))
    throw InvalidPartition(set.to_string() + " out of range for " + std::to_string(n) + " subsystems");
}

/// Full basis index for every (kept, traced) multi-index pair; entry
/// [k * traced_dim + t]. Both kept and traced digits are row-major in label order.
struct IndexSplit {
  int kept_dim = 1;
  int traced_dim = 1;
  std::vector<int> full;
};

inline IndexSplit split_indices(const Dims& dims, const SubsystemSet& keep) {
  IndexSplit s;
  const int n = static_cast<int>(dims.size());
  for (int i = 0; i < n; ++i) (keep.contains(i) ? s.kept_dim : s.traced_dim) *= dims[i];
  const int total = s.kept_dim * s.traced_dim;
  s.full.assign(static_cast<std::size_t>(total), 0);
  std::vector<int> digit(static_cast<std::size_t>(n), 0);
  for (int f = 0; f < total; ++f) {
    int rem = f;
    for (int i = n - 1; i >= 0; --i) {
      digit[i] = rem % dims[i];
      rem /= dims[i];
    }
    int k = 0;
    int t = 0;
    for (int i = 0; i < n; ++i) {
      if (keep.contains(i))
        k = k * dims[i] + digit[i];
      else
        t = t * dims[i] + digit[i];
    }
    s.full[static_cast<std::size_t>(k * s.traced_dim + t)] = f;
  }
  return s;
}

/// Permutation p with p[new_index] = old_index when subsystems are reordered
/// so that new subsystem j is old subsystem order[j].
inline std::vector<int> reorder_permutation(const Dims& dims, const std::vector<int>& order) {
  const int n = static_cast<int>(dims.size());
  const int total = total_dim(dims);
  std::vector<int> old_stride(static_cast<std::size_t>(n), 1);
  for (int i = n - 2; i >= 0; --i) old_stride[i] = old_stride[i + 1] * dims[i + 1];
  std::vector<int> perm(static_cast<std::size_t>(total));
  for (int f = 0; f < total; ++f) {
    int rem = f;
    int old = 0;
    for (int j = n - 1; j >= 0; --j) {
      const int d = dims[order[j]];
      old += (rem % d) * old_stride[order[j]];
      rem /= d;
    }
    perm[f] = old;
  }
  return perm;
}

inline Matrix reorder(const Matrix& m, const Dims& dims, const std::vector<int>& order) {
  const auto perm = reorder_permutation(dims, order);
  const int total = static_cast<int>(perm.size());
  Matrix out(total, total);
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j) out(i, j) = m(perm[i], perm[j]);
  return out;
}

inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

/// Entropy (bits) of a normalized spectrum; tiny negative values count as zero.
inline double spectrum_entropy(const Eigen::VectorXd& eigenvalues) {
  double s = 0.0;
  for (double v : eigenvalues) s -= xlog2x(std::clamp(v, 0.0, 1.0));
  return s;
}

/// Lenient entropy of a positive operator after normalizing by its trace.
inline double entropy_of(const Matrix& sigma) {
  const double tr = sigma.trace().real();
  if (tr <= 0.0) return 0.0;
  if (sigma.rows() == 1) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma / tr, Eigen::EigenvaluesOnly);
  return spectrum_entropy(es.eigenvalues());
}

}  // namespace detail

/// Normalized amplitude vector of an N-subsystem pure state.
class PureState {
 public:
  PureState(Dims dims, Vector amplitudes) : dims_(std::move(dims)), amplitudes_(std::move(amplitudes)) {
    detail::check_dims(dims_);
    if (amplitudes_.size() != total_dim(dims_))
      throw DimensionError(std::to_string(amplitudes_.size()) + " amplitudes for dims " + to_string(dims_));
    const double norm = amplitudes_.squaredNorm();
    if (std::abs(norm - 1.0) > kNormTol)
      throw DimensionError("state norm^2 " + std::to_string(norm) + " differs from 1");
  }

  /// Normalizes `amplitudes` before validating.
  static PureState normalized(Dims dims, Vector amplitudes) {
    const double n = amplitudes.norm();
    if (n == 0.0) throw DimensionError("zero vector cannot be normalized");
    return PureState(std::move(dims), amplitudes / n);
  }

  const Dims& dims() const { return dims_; }
  const Vector& amplitudes() const { return amplitudes_; }
  int n_parties() const { return static_cast<int>(dims_.size()); }
  int dim() const { return static_cast<int>(amplitudes_.size()); }
  SubsystemSet all() const { return SubsystemSet::range(n_parties()); }

 private:
  Dims dims_;
  Vector amplitudes_;
};

/// Hermitian, positive semidefinite, unit-trace operator.
class DensityMatrix {
 public:
  DensityMatrix(Dims dims, Matrix matrix) : dims_(std::move(dims)), matrix_(std::move(matrix)) {
    detail::check_dims(dims_);
    const int d = total_dim(dims_);
    if (matrix_.rows() != d || matrix_.cols() != d)
      throw DimensionError("matrix side " + std::to_string(matrix_.rows()) + " for dims " + to_string(dims_));
    if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) throw DimensionError("matrix is not Hermitian");
    if (std::abs(matrix_.trace() - cplx(1.0)) > kTraceTol) throw DimensionError("trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kEigenTol) throw DimensionError("matrix is not positive semidefinite");
  }

  /// Skips validation; for operators built internally from valid inputs.
  static DensityMatrix trusted(Dims dims, Matrix matrix) { return DensityMatrix(std::move(dims), std::move(matrix), 0); }

  static DensityMatrix projector(const PureState& psi) {
    return trusted(psi.dims(), psi.amplitudes() * psi.amplitudes().adjoint());
  }
  static DensityMatrix maximally_mixed(Dims dims) {
    const int d = total_dim(dims);
    return DensityMatrix(std::move(dims), Matrix::Identity(d, d) / static_cast<double>(d));
  }

  const Dims& dims() const { return dims_; }
  const Matrix& matrix() const { return matrix_; }
  int n_parties() const { return static_cast<int>(dims_.size()); }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  SubsystemSet all() const { return SubsystemSet::range(n_parties()); }

 private:
  DensityMatrix(Dims dims, Matrix matrix, int) : dims_(std::move(dims)), matrix_(std::move(matrix)) {}

  Dims dims_;
  Matrix matrix_;
};

/// Kronecker product, left factor on the most significant positions.
inline DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  const Matrix& x = a.matrix();
  const Matrix& y = b.matrix();
  Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return DensityMatrix::trusted(std::move(dims), std::move(out));
}

inline Dims sub_dims(const Dims& dims, const SubsystemSet& keep) {
  Dims out;
  out.reserve(keep.size());
  for (int i : keep) out.push_back(dims[static_cast<std::size_t>(i)]);
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, const SubsystemSet& keep) {
  if (keep.empty()) throw InvalidPartition("nothing kept");
  detail::check_within(keep, rho.dims().size());
  if (static_cast<int>(keep.size()) == rho.n_parties()) return rho;
  const auto split = detail::split_indices(rho.dims(), keep);
  const Matrix& m = rho.matrix();
  Matrix out = Matrix::Zero(split.kept_dim, split.kept_dim);
  for (int k = 0; k < split.kept_dim; ++k)
    for (int l = 0; l < split.kept_dim; ++l) {
      cplx acc = 0.0;
      for (int t = 0; t < split.traced_dim; ++t)
        acc += m(split.full[k * split.traced_dim + t], split.full[l * split.traced_dim + t]);
      out(k, l) = acc;
    }
  return DensityMatrix::trusted(sub_dims(rho.dims(), keep), std::move(out));
}

/// Same as partial_trace(|psi><psi|, keep) without building the projector.
inline DensityMatrix reduced_state(const PureState& psi, const SubsystemSet& keep) {
  if (keep.empty()) throw InvalidPartition("nothing kept");
  detail::check_within(keep, psi.dims().size());
  const auto split = detail::split_indices(psi.dims(), keep);
  Matrix coeffs(split.kept_dim, split.traced_dim);
  for (int k = 0; k < split.kept_dim; ++k)
    for (int t = 0; t < split.traced_dim; ++t) coeffs(k, t) = psi.amplitudes()(split.full[k * split.traced_dim + t]);
  Matrix rho = coeffs * coeffs.adjoint();
  return DensityMatrix::trusted(sub_dims(psi.dims(), keep), std::move(rho));
}

/// Relabels parties so that old subsystem i becomes subsystem perm[i].
inline PureState permute_parties(const PureState& psi, const std::vector<int>& perm) {
  const int n = psi.n_parties();
  if (static_cast<int>(perm.size()) != n) throw InvalidPartition("permutation length differs from party count");
  std::vector<int> order(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    if (perm[i] < 0 || perm[i] >= n || order[perm[i]] != -1) throw InvalidPartition("not a permutation");
    order[perm[i]] = i;
  }
  Dims dims(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) dims[perm[i]] = psi.dims()[i];
  const auto p = detail::reorder_permutation(psi.dims(), order);
  Vector amp(psi.dim());
  for (int f = 0; f < psi.dim(); ++f) amp(f) = psi.amplitudes()(p[f]);
  return PureState(std::move(dims), std::move(amp));
}

/// S(rho) in bits. Eigenvalues within 1e-9 outside [0, 1] are clamped;
/// anything further out is rejected.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (ev.minCoeff() < -kEigenTol || ev.maxCoeff() > 1.0 + kEigenTol)
    throw DimensionError("spectrum outside [0, 1] beyond tolerance");
  return detail::spectrum_entropy(ev);
}

/// S(rho_A) of a pure state; empty or full sets have zero entropy.
inline double subset_entropy(const PureState& psi, const SubsystemSet& set) {
  const int n = psi.n_parties();
  if (set.empty() || static_cast<int>(set.size()) == n) return 0.0;
  const SubsystemSet rest = set.complement(n);
  const auto side_dim = [&](const SubsystemSet& s) { return total_dim(sub_dims(psi.dims(), s)); };
  return von_neumann_entropy(reduced_state(psi, side_dim(rest) < side_dim(set) ? rest : set));
}

/// S(rho_AB) - S(rho_B) in bits; may be negative.
inline double conditional_entropy(const PureState& psi, const SubsystemSet& a, const SubsystemSet& b) {
  if (a.empty()) throw InvalidPartition("empty target set");
  if (!a.disjoint(b)) throw InvalidPartition(a.to_string() + " overlaps " + b.to_string());
  detail::check_within(a | b, psi.dims().size());
  return subset_entropy(psi, a | b) - subset_entropy(psi, b);
}

/// I(A:C) = S_A + S_C - S_AC where A and C partition rho's subsystems.
inline double mutual_information(const DensityMatrix& rho, const SubsystemSet& a, const SubsystemSet& c) {
  if (a.empty() || c.empty()) throw InvalidPartition("empty side");
  if (!a.disjoint(c)) throw InvalidPartition(a.to_string() + " overlaps " + c.to_string());
  if ((a | c) != rho.all()) throw InvalidPartition("sides do not cover the state");
  return von_neumann_entropy(partial_trace(rho, a)) + von_neumann_entropy(partial_trace(rho, c)) -
         von_neumann_entropy(rho);
}

}  // namespace qcorr
