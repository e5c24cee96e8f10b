#pragma once

// Bipartite correlation measures: entanglement of formation (pure, Wootters
// closed form, numerical convex roof), classical correlation and discord
// under rank-1 projective measurements, and the Koashi-Winter cross-route.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "qcorr/hilbert.hpp"
#include "qcorr/optimize.hpp"

namespace qcorr {

/// Tolerance budget (bits) for numerically optimized quantities.
namespace tolerance {
inline constexpr double kSingleOptimizer = 5e-3;
inline constexpr double kStackedOptimizers = 1e-2;
inline constexpr double kLargeConvexRoof = 2e-2;
}  // namespace tolerance

/// An optimized value plus whether the winning local search terminated on
/// its convergence test. Closed-form values are always converged.
struct Estimate {
  double value = 0.0;
  bool converged = true;
};

/// Rank-1 measurement on the measured subsystem: elements |v_k><v_k| with
/// sum_k |v_k><v_k| = I. Projective when there are exactly d unit vectors.
struct MeasurementBasis {
  std::vector<Vector> vectors;
  /// Projective qubit basis: (theta, phi) of the first Bloch vector.
  /// Otherwise the K^2 real parameters of H with U = exp(iH), where the
  /// vectors are the columns of the first d rows of the K x K unitary U:
  /// diagonal, then Re/Im of the strict upper triangle row by row.
  std::vector<double> parameters;

  bool projective() const { return !vectors.empty() && vectors.size() == static_cast<std::size_t>(vectors.front().size()); }

  double max_orthonormality_error() const {
    double err = 0.0;
    for (std::size_t i = 0; i < vectors.size(); ++i)
      for (std::size_t j = 0; j < vectors.size(); ++j)
        err = std::max(err, std::abs(vectors[i].dot(vectors[j]) - cplx(i == j ? 1.0 : 0.0)));
    return err;
  }

  double completeness_error() const {
    if (vectors.empty()) return 0.0;
    const auto d = vectors.front().size();
    Matrix sum = -Matrix::Identity(d, d);
    for (const auto& v : vectors) sum += v * v.adjoint();
    return sum.cwiseAbs().maxCoeff();
  }
};

struct EnsembleDecomposition {
  std::vector<double> probabilities;
  std::vector<Vector> members;

  Matrix mixture() const {
    Matrix out = Matrix::Zero(members.front().size(), members.front().size());
    for (std::size_t i = 0; i < members.size(); ++i) out += probabilities[i] * members[i] * members[i].adjoint();
    return out;
  }
};

struct ConvexRoofResult {
  double value = 0.0;
  EnsembleDecomposition ensemble;
  bool converged = true;
  int rank = 0;
};

struct ClassicalCorrelationResult {
  double value = 0.0;
  MeasurementBasis basis;
  bool converged = true;
};

namespace detail {

inline constexpr double kLn2 = std::numbers::ln2;
inline constexpr double kLogFloor = 1e-15;
inline constexpr double kZeroProbability = 1e-12;

/// p * S(sigma / p) for an unnormalized block and, optionally, its derivative
/// -log2(sigma / p) with respect to sigma.
struct EntropyTerm {
  double weighted_entropy = 0.0;
  Matrix gradient;
};

inline EntropyTerm entropy_term(const Matrix& sigma, bool with_gradient) {
  EntropyTerm out;
  const double p = sigma.trace().real();
  if (p < kZeroProbability) {
    if (with_gradient) out.gradient = Matrix::Zero(sigma.rows(), sigma.cols());
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma / p, with_gradient ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& mu = es.eigenvalues();
  out.weighted_entropy = p * spectrum_entropy(mu);
  if (with_gradient) {
    Eigen::VectorXd logs(mu.size());
    for (Eigen::Index k = 0; k < mu.size(); ++k) logs(k) = -std::log2(std::max(mu(k), kLogFloor));
    out.gradient = es.eigenvectors() * logs.asDiagonal() * es.eigenvectors().adjoint();
  }
  return out;
}

inline double binary_entropy(double x) { return -xlog2x(x) - xlog2x(1.0 - x); }

/// Sets `target` then `rest` (each in label order) as the new subsystem order.
inline std::vector<int> split_order(const SubsystemSet& target, const SubsystemSet& rest) {
  std::vector<int> order(target.begin(), target.end());
  order.insert(order.end(), rest.begin(), rest.end());
  return order;
}

inline void check_bipartition(const DensityMatrix& rho, const SubsystemSet& a, const SubsystemSet& c) {
  if (a.empty() || c.empty()) throw InvalidPartition("empty side");
  if (!a.disjoint(c)) throw InvalidPartition(a.to_string() + " overlaps " + c.to_string());
  if ((a | c) != rho.all()) throw InvalidPartition(a.to_string() + " and " + c.to_string() + " do not cover the state");
}

/// Measurement of the C factor of a (A, C)-ordered state: sigma_i = <v_i| rho |v_i>_C.
class MeasurementObjective {
 public:
  MeasurementObjective(const Matrix& rho_ac, int dim_a, int dim_c) : dim_a_(dim_a), dim_c_(dim_c) {
    blocks_.resize(static_cast<std::size_t>(dim_c * dim_c));
    for (int c = 0; c < dim_c; ++c)
      for (int cp = 0; cp < dim_c; ++cp) {
        Matrix b(dim_a, dim_a);
        for (int a = 0; a < dim_a; ++a)
          for (int ap = 0; ap < dim_a; ++ap) b(a, ap) = rho_ac(a * dim_c + c, ap * dim_c + cp);
        blocks_[static_cast<std::size_t>(c * dim_c + cp)] = std::move(b);
      }
    marginal_ = Matrix::Zero(dim_a, dim_a);
    for (int c = 0; c < dim_c; ++c) marginal_ += block(c, c);
  }

  const Matrix& block(int c, int cp) const { return blocks_[static_cast<std::size_t>(c * dim_c_ + cp)]; }
  const Matrix& marginal() const { return marginal_; }
  int dim_c() const { return dim_c_; }

  Matrix conditional(const Vector& v) const {
    Matrix sigma = Matrix::Zero(dim_a_, dim_a_);
    for (int c = 0; c < dim_c_; ++c)
      for (int cp = 0; cp < dim_c_; ++cp) {
        const cplx w = std::conj(v(c)) * v(cp);
        if (w != cplx(0.0)) sigma += w * block(c, cp);
      }
    return sigma;
  }

  /// Average post-measurement entropy of A for the measurement whose vectors
  /// are the columns of the first d_C rows of the unitary u (u is d_C x d_C
  /// for a projective basis, K x K for a K-outcome POVM).
  double operator()(const Matrix& u, Matrix* grad) const {
    const Matrix v = u.topRows(dim_c_);
    const auto outcomes = v.cols();
    double f = 0.0;
    std::vector<Matrix> m;
    if (grad) m.reserve(static_cast<std::size_t>(outcomes));
    for (Eigen::Index i = 0; i < outcomes; ++i) {
      const EntropyTerm term = entropy_term(conditional(v.col(i)), grad != nullptr);
      f += term.weighted_entropy;
      if (grad) {
        Matrix mi(dim_c_, dim_c_);
        for (int c = 0; c < dim_c_; ++c)
          for (int cp = 0; cp < dim_c_; ++cp) mi(c, cp) = (term.gradient * block(c, cp)).trace();
        m.push_back(std::move(mi));
      }
    }
    if (grad) {
      grad->resize(outcomes, outcomes);
      for (Eigen::Index i = 0; i < outcomes; ++i)
        grad->row(i) = v.col(i).adjoint() * m[static_cast<std::size_t>(i)] * v;
    }
    return f;
  }

  /// Objective restricted to a qubit basis with Bloch angles (theta, phi).
  double qubit(double theta, double phi) const {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const cplx e = std::polar(1.0, phi);
    const Matrix sigma0 = c * c * block(0, 0) + s * s * block(1, 1) + c * s * (e * block(0, 1) + std::conj(e) * block(1, 0));
    return entropy_term(sigma0, false).weighted_entropy + entropy_term(marginal_ - sigma0, false).weighted_entropy;
  }

 private:
  int dim_a_;
  int dim_c_;
  std::vector<Matrix> blocks_;
  Matrix marginal_;
};

inline Matrix qubit_basis(double theta, double phi) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  Matrix v(2, 2);
  v << c, -std::polar(s, -phi), std::polar(s, phi), c;
  return v;
}

inline std::vector<double> unitary_parameters(const Matrix& u) {
  const int d = static_cast<int>(u.rows());
  std::vector<double> params;
  if (d == 2) {
    const double theta = 2.0 * std::acos(std::clamp(std::abs(u(0, 0)), 0.0, 1.0));
    const double phi = std::abs(u(1, 0)) > 0.0 && std::abs(u(0, 0)) > 0.0 ? std::arg(u(1, 0)) - std::arg(u(0, 0))
                                                                         : std::arg(u(1, 0));
    return {theta, std::remainder(phi, 2.0 * std::numbers::pi)};
  }
  Eigen::ComplexSchur<Matrix> schur(u);
  Vector angles = schur.matrixT().diagonal().unaryExpr([](cplx z) { return cplx(std::arg(z), 0.0); });
  const Matrix h = schur.matrixU() * angles.asDiagonal() * schur.matrixU().adjoint();
  for (int i = 0; i < d; ++i) params.push_back(h(i, i).real());
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      params.push_back(h(i, j).real());
      params.push_back(h(i, j).imag());
    }
  return params;
}

/// Side on which a convex roof evaluates member entropies: the smaller
/// factor, ties toward the side holding label 0. Independent of which side
/// the caller names, so E(A|B) and E(B|A) run the same computation.
inline SubsystemSet entropy_side(const Dims& dims, const SubsystemSet& a) {
  const SubsystemSet b = a.complement(static_cast<int>(dims.size()));
  const int da = total_dim(sub_dims(dims, a));
  const int db = total_dim(sub_dims(dims, b));
  if (da != db) return da < db ? a : b;
  return a.contains(0) ? a : b;
}

/// Eigenvectors scaled by sqrt(eigenvalue), descending, with the largest
/// component of each made real positive.
inline Matrix weighted_eigenvectors(const Matrix& rho, int* rank) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double cutoff = 1e-12 * std::max(lam.maxCoeff(), 1e-300);
  std::vector<int> keep;
  for (Eigen::Index k = lam.size() - 1; k >= 0; --k)
    if (lam(k) > cutoff) keep.push_back(static_cast<int>(k));
  *rank = static_cast<int>(keep.size());
  Matrix w(rho.rows(), *rank);
  for (int j = 0; j < *rank; ++j) {
    Vector e = es.eigenvectors().col(keep[static_cast<std::size_t>(j)]);
    Eigen::Index big = 0;
    e.cwiseAbs().maxCoeff(&big);
    e *= std::abs(e(big)) / e(big);
    w.col(j) = std::sqrt(lam(keep[static_cast<std::size_t>(j)])) * e;
  }
  return w;
}

/// Average marginal entropy of the ensemble W T, T the first r rows of q.
class ConvexRoofObjective {
 public:
  ConvexRoofObjective(Matrix weighted, int dim_side, int dim_rest)
      : w_(std::move(weighted)), dim_side_(dim_side), dim_rest_(dim_rest) {}

  Matrix members(const Matrix& q) const { return w_ * q.topRows(w_.cols()); }

  double operator()(const Matrix& q, Matrix* grad) const {
    const Matrix phi = members(q);
    const Eigen::Index k = phi.cols();
    Matrix z(phi.rows(), k);
    double f = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      const Eigen::Map<const Matrix> m(phi.col(i).data(), dim_rest_, dim_side_);  // column-major: (rest, side)
      const Matrix sigma = (m.transpose() * m.conjugate()).eval();                 // side x side
      const EntropyTerm term = entropy_term(sigma, grad != nullptr);
      f += term.weighted_entropy;
      if (grad) {
        // (G (x) I) phi_i with G acting on the side factor.
        Matrix zi = m * term.gradient.transpose();
        z.col(i) = Eigen::Map<const Vector>(zi.data(), zi.size());
      }
    }
    if (grad) *grad = z.adjoint() * phi;
    return f;
  }

 private:
  Matrix w_;
  int dim_side_;
  int dim_rest_;
};

}  // namespace detail

/// Entropy of entanglement of a pure state across (A, complement).
inline double ef_pure(const PureState& psi, const SubsystemSet& a) {
  detail::check_within(a, psi.dims().size());
  if (a.empty() || static_cast<int>(a.size()) == psi.n_parties()) throw InvalidPartition("need a proper non-empty subset");
  return subset_entropy(psi, a);
}

inline void require_two_qubits(const DensityMatrix& rho) {
  if (rho.dims() != Dims{2, 2}) throw DimensionError("two-qubit state required, got " + to_string(rho.dims()));
}

/// Wootters concurrence: max(0, l1 - l2 - l3 - l4) with l_i the decreasing
/// square roots of the spectrum of sqrt(rho) rho~ sqrt(rho).
inline double concurrence_wootters(const DensityMatrix& rho) {
  require_two_qubits(rho);
  Matrix yy = Matrix::Zero(4, 4);
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  // Rounding-level eigenvalues would enter sqrt(rho) at ~1e-8 and make the
  // result basis dependent; below the cutoff they are treated as exact zeros.
  const double cutoff = 1e-14 * es.eigenvalues().maxCoeff();
  const Eigen::VectorXd roots = es.eigenvalues().unaryExpr([&](double x) { return x > cutoff ? std::sqrt(x) : 0.0; });
  const Matrix sqrt_rho = es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
  // The lambda_i are the singular values of sqrt(rho) sqrt(rho~), with
  // sqrt(rho~) = (Y x Y) sqrt(rho)* (Y x Y); an SVD keeps the small ones
  // accurate where square roots of eigenvalues near zero would not.
  const Matrix sqrt_tilde = yy * sqrt_rho.conjugate() * yy;
  Eigen::JacobiSVD<Matrix> svd(sqrt_rho * sqrt_tilde);
  std::vector<double> lam(4);
  for (int i = 0; i < 4; ++i) lam[i] = svd.singularValues()(i);
  std::sort(lam.rbegin(), lam.rend());
  return std::clamp(lam[0] - lam[1] - lam[2] - lam[3], 0.0, 1.0);
}

inline double ef_from_concurrence(double c) {
  return detail::binary_entropy(0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c))));
}

inline double ef_two_qubit(const DensityMatrix& rho) { return ef_from_concurrence(concurrence_wootters(rho)); }

/// Upper bound on E(rho) across (A, complement) by minimizing the average
/// member entanglement over ensembles of size ensemble_size_factor * rank.
/// Restart 0 starts from the spectral ensemble; the others from Haar-random
/// mixings seeded by (cfg.seed, restart).
inline ConvexRoofResult ef_convex_roof(const DensityMatrix& rho, const SubsystemSet& a, const OptimizerConfig& cfg) {
  cfg.validate();
  detail::check_within(a, rho.dims().size());
  if (a.empty() || static_cast<int>(a.size()) == rho.n_parties()) throw InvalidPartition("need a proper non-empty subset");
  const SubsystemSet side = detail::entropy_side(rho.dims(), a);
  const SubsystemSet rest = side.complement(rho.n_parties());
  const auto order = detail::split_order(side, rest);
  const Matrix reordered = detail::reorder(rho.matrix(), rho.dims(), order);
  const auto perm = detail::reorder_permutation(rho.dims(), order);
  const int dim_side = total_dim(sub_dims(rho.dims(), side));
  const int dim_rest = total_dim(sub_dims(rho.dims(), rest));

  // Members are stored with the side index most significant; the objective
  // maps them column-major as (rest, side).
  int rank = 0;
  const Matrix w = detail::weighted_eigenvectors(reordered, &rank);
  const detail::ConvexRoofObjective objective(w, dim_side, dim_rest);

  const auto to_original = [&](const Vector& v) {
    Vector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out(perm[static_cast<std::size_t>(i)]) = v(i);
    return out;
  };

  ConvexRoofResult best;
  best.rank = rank;
  if (rank == 1) {
    best.value = objective(Matrix::Identity(1, 1), nullptr);
    best.ensemble.probabilities = {1.0};
    best.ensemble.members = {to_original(w.col(0).normalized())};
    return best;
  }

  const int k = cfg.ensemble_size_factor * rank;
  UnitarySearchResult winner;
  winner.value = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.restarts; ++r) {
    Matrix start = Matrix::Identity(k, k);
    if (r > 0) {
      Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(r)));
      start = haar_unitary(k, rng);
    }
    auto run = minimize_over_unitaries(objective, std::move(start), cfg.max_iterations, cfg.convergence_tol);
    if (run.value < winner.value) winner = std::move(run);
  }
  best.value = std::max(winner.value, 0.0);
  best.converged = winner.converged;
  const Matrix phi = objective.members(winner.unitary);
  for (Eigen::Index i = 0; i < phi.cols(); ++i) {
    const double p = phi.col(i).squaredNorm();
    if (p < detail::kZeroProbability * 1e-3) continue;
    best.ensemble.probabilities.push_back(p);
    best.ensemble.members.push_back(to_original(phi.col(i) / std::sqrt(p)));
  }
  return best;
}

/// J(A|C): largest average entropy reduction of A over rank-1 measurements
/// on C. First over projective bases: qubit C seeded from a 64 x 128
/// (theta, phi) grid, larger C from the computational basis, the remaining
/// restarts from Haar-random bases, each refined by conjugate gradients on
/// U(d_C). Then over rank-1 POVMs with K = ensemble_size_factor * d_C
/// outcomes (the first d_C rows of a unitary on U(K)), started from the
/// perturbed projective optimum and from Haar-random unitaries. The better
/// of the two phases wins, so the POVM phase can only raise J.
inline ClassicalCorrelationResult classical_correlation(const DensityMatrix& rho, const SubsystemSet& a,
                                                        const SubsystemSet& c, const OptimizerConfig& cfg) {
  cfg.validate();
  detail::check_bipartition(rho, a, c);
  const Matrix reordered = detail::reorder(rho.matrix(), rho.dims(), detail::split_order(a, c));
  const int dim_a = total_dim(sub_dims(rho.dims(), a));
  const int dim_c = total_dim(sub_dims(rho.dims(), c));
  const detail::MeasurementObjective objective(reordered, dim_a, dim_c);
  const double s_a = detail::entropy_of(objective.marginal());

  UnitarySearchResult winner;
  winner.value = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.restarts; ++r) {
    Matrix start;
    if (r == 0 && dim_c == 2) {
      constexpr int kTheta = 64;
      constexpr int kPhi = 128;
      double best = std::numeric_limits<double>::infinity();
      double best_theta = 0.0;
      double best_phi = 0.0;
      for (int i = 0; i < kTheta; ++i)
        for (int j = 0; j < kPhi; ++j) {
          const double theta = std::numbers::pi * i / kTheta;
          const double phi = 2.0 * std::numbers::pi * j / kPhi;
          const double v = objective.qubit(theta, phi);
          if (v < best) {
            best = v;
            best_theta = theta;
            best_phi = phi;
          }
          if (i == 0) break;  // phi is irrelevant at the pole
        }
      start = detail::qubit_basis(best_theta, best_phi);
    } else if (r == 0) {
      start = Matrix::Identity(dim_c, dim_c);
    } else {
      Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(r)));
      start = haar_unitary(dim_c, rng);
    }
    auto run = minimize_over_unitaries(objective, std::move(start), cfg.max_iterations, cfg.convergence_tol);
    if (run.value < winner.value) winner = std::move(run);
  }

  const int outcomes = cfg.ensemble_size_factor * dim_c;
  if (outcomes > dim_c) {
    // The projective optimum embedded in U(K) is a stationary point (the extra
    // outcomes enter at second order), so it is nudged off before refinement.
    constexpr double kNudge = 0.1;
    // Separate stream so that raising `restarts` only appends starts.
    const std::uint64_t povm_seed = derive_seed(cfg.seed, 0x706f766dULL);
    for (int r = 0; r < cfg.restarts; ++r) {
      Rng rng(derive_seed(povm_seed, static_cast<std::uint64_t>(r)));
      Matrix start;
      if (r == 0) {
        Matrix embedded = Matrix::Identity(outcomes, outcomes);
        embedded.topLeftCorner(dim_c, dim_c) = winner.unitary.topLeftCorner(dim_c, dim_c);
        const Matrix g = gaussian_matrix(outcomes, outcomes, rng);
        start = embedded * expm_skew(kNudge * (g - g.adjoint()) / g.norm());
      } else {
        start = haar_unitary(outcomes, rng);
      }
      auto run = minimize_over_unitaries(objective, std::move(start), cfg.max_iterations, cfg.convergence_tol);
      if (run.value < winner.value) winner = std::move(run);
    }
  }

  // Early stopping leaves ~1e-8 bits; only the winner is refined further.
  auto polished = minimize_over_unitaries(objective, winner.unitary, cfg.max_iterations, 1e-6 * cfg.convergence_tol);
  if (polished.value <= winner.value) {
    polished.converged = polished.converged || winner.converged;
    winner = std::move(polished);
  }

  ClassicalCorrelationResult out;
  out.value = std::max(s_a - winner.value, 0.0);
  out.converged = winner.converged;
  const Matrix v = winner.unitary.topRows(dim_c);
  for (Eigen::Index i = 0; i < v.cols(); ++i) out.basis.vectors.push_back(v.col(i));
  out.basis.parameters = detail::unitary_parameters(winner.unitary);
  return out;
}

/// delta(A|C) = I(A:C) - J(A|C), measurement on C.
inline Estimate discord(const DensityMatrix& rho, const SubsystemSet& a, const SubsystemSet& c, const OptimizerConfig& cfg) {
  const auto j = classical_correlation(rho, a, c, cfg);
  return {mutual_information(rho, a, c) - j.value, j.converged};
}

/// E(rho_XY) of a pure state's marginal: pure cut when X, Y cover the state,
/// Wootters when both are single qubits, convex roof otherwise.
inline Estimate ef_marginal(const PureState& psi, const SubsystemSet& x, const SubsystemSet& y, const OptimizerConfig& cfg) {
  if (x.empty() || y.empty()) throw InvalidPartition("empty side");
  if (!x.disjoint(y)) throw InvalidPartition(x.to_string() + " overlaps " + y.to_string());
  const SubsystemSet xy = x | y;
  detail::check_within(xy, psi.dims().size());
  if (static_cast<int>(xy.size()) == psi.n_parties()) return {ef_pure(psi, x), true};
  const DensityMatrix rho = reduced_state(psi, xy);
  const SubsystemSet x_rel = x.relative_to(xy);
  if (rho.dims() == Dims{2, 2}) return {ef_two_qubit(rho), true};
  const auto roof = ef_convex_roof(rho, x_rel, cfg);
  return {roof.value, roof.converged};
}

/// delta(X|Y) on the marginal rho_XY of a pure state.
inline Estimate discord_marginal(const PureState& psi, const SubsystemSet& x, const SubsystemSet& y, const OptimizerConfig& cfg) {
  if (x.empty() || y.empty()) throw InvalidPartition("empty side");
  if (!x.disjoint(y)) throw InvalidPartition(x.to_string() + " overlaps " + y.to_string());
  const SubsystemSet xy = x | y;
  detail::check_within(xy, psi.dims().size());
  const DensityMatrix rho = reduced_state(psi, xy);
  return discord(rho, x.relative_to(xy), y.relative_to(xy), cfg);
}

inline ClassicalCorrelationResult classical_correlation_marginal(const PureState& psi, const SubsystemSet& x,
                                                                 const SubsystemSet& y, const OptimizerConfig& cfg) {
  if (x.empty() || y.empty()) throw InvalidPartition("empty side");
  if (!x.disjoint(y)) throw InvalidPartition(x.to_string() + " overlaps " + y.to_string());
  const SubsystemSet xy = x | y;
  detail::check_within(xy, psi.dims().size());
  return classical_correlation(reduced_state(psi, xy), x.relative_to(xy), y.relative_to(xy), cfg);
}

/// delta(A|C) through E(rho_AB) = delta(A|C) + S(A|C), B the remaining parties.
inline Estimate discord_via_kw(const PureState& psi, const SubsystemSet& a, const SubsystemSet& c, const OptimizerConfig& cfg) {
  if (a.empty() || c.empty() || !a.disjoint(c)) throw InvalidPartition("A and C must be non-empty and disjoint");
  detail::check_within(a | c, psi.dims().size());
  const SubsystemSet b = (a | c).complement(psi.n_parties());
  if (b.empty()) throw InvalidPartition("no purifying parties left for B");
  const Estimate e = ef_marginal(psi, a, b, cfg);
  return {e.value - conditional_entropy(psi, a, c), e.converged};
}

/// E(AB) + J(A|C) - S(A); zero for exact optimizers.
inline Estimate kw_residual(const PureState& psi, const SubsystemSet& a, const SubsystemSet& b, const SubsystemSet& c,
                            const OptimizerConfig& cfg) {
  if (a.empty() || b.empty() || c.empty()) throw InvalidPartition("empty side");
  if (!a.disjoint(b) || !a.disjoint(c) || !b.disjoint(c)) throw InvalidPartition("overlapping sides");
  if ((a | b | c) != psi.all()) throw InvalidPartition("A, B, C must partition the state");
  const Estimate e = ef_marginal(psi, a, b, cfg);
  const auto j = classical_correlation_marginal(psi, a, c, cfg);
  return {e.value + j.value - subset_entropy(psi, a), e.converged && j.converged};
}

}  // namespace qcorr
