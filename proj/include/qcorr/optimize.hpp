#pragma once

// Seeded randomness and local search over the unitary group.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>

#include "qcorr/hilbert.hpp"

namespace qcorr {

/// Multi-start local search settings shared by every optimized measure.
struct OptimizerConfig {
  int restarts = 8;
  int max_iterations = 1000;
  double convergence_tol = 1e-9;  // bits
  std::uint64_t seed = 0x5eed;
  int ensemble_size_factor = 2;

  void validate() const {
    if (restarts < 1 || max_iterations < 1 || !(convergence_tol > 0.0) || ensemble_size_factor < 1)
      throw std::invalid_argument("optimizer settings must be positive");
  }
};

using Rng = std::mt19937_64;

/// splitmix64 finalizer; decorrelates (seed, index) pairs.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline OptimizerConfig with_seed(OptimizerConfig cfg, std::uint64_t index) {
  cfg.seed = derive_seed(cfg.seed, index);
  return cfg;
}

inline Matrix gaussian_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = cplx(re, im);
    }
  return g;
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the R-diagonal phases removed.
inline Matrix haar_unitary(int n, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(n, n, rng));
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

/// exp(x) for anti-Hermitian x, unitary to machine precision.
inline Matrix expm_skew(const Matrix& x) {
  const Matrix h = cplx(0.0, 1.0) * x;  // Hermitian
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  const Eigen::VectorXd& lam = es.eigenvalues();
  Vector phases(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) phases(i) = std::polar(1.0, -lam(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

struct UnitarySearchResult {
  Matrix unitary;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Polak-Ribiere conjugate gradients on U(K) along the curves U exp(tX).
///
/// `objective(u, &a)` returns f(u) and fills the K x K matrix `a` such that
/// the derivative along X is 2 Re tr(a X). The Riemannian gradient is then
/// a^dagger - a. Armijo backtracking line search; converged means the
/// decrease stayed below `tol` for three consecutive iterations or no descent
/// step exists, as opposed to running out of iterations.
template <class Objective>
UnitarySearchResult minimize_over_unitaries(Objective&& objective, Matrix u, int max_iterations, double tol) {
  UnitarySearchResult res;
  Matrix a;
  double value = objective(u, &a);
  Matrix grad = a.adjoint() - a;
  Matrix dir = -grad;
  double step = 0.5 / std::max(dir.norm(), 1e-12);
  int quiet = 0;
  const int dim = static_cast<int>(u.rows());
  int it = 0;
  for (; it < max_iterations; ++it) {
    if (grad.norm() < 1e-11) {
      res.converged = true;
      break;
    }
    double slope = (grad.adjoint() * dir).trace().real();
    if (slope >= 0.0) {
      dir = -grad;
      slope = -grad.squaredNorm();
    }
    bool accepted = false;
    Matrix next_u;
    Matrix next_a;
    double next_value = value;
    double t = step;
    for (int bt = 0; bt < 50; ++bt, t *= 0.5) {
      next_u = u * expm_skew(t * dir);
      next_value = objective(next_u, &next_a);
      if (next_value <= value + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if ((dir + grad).norm() > 1e-14 * std::max(1.0, grad.norm())) {
        dir = -grad;  // retry from steepest descent
        continue;
      }
      res.converged = true;
      break;
    }
    const double decrease = value - next_value;
    u = std::move(next_u);
    value = next_value;
    const Matrix next_grad = next_a.adjoint() - next_a;
    const double denom = grad.squaredNorm();
    double beta = denom > 0.0 ? (next_grad.adjoint() * (next_grad - grad)).trace().real() / denom : 0.0;
    if (beta < 0.0 || (it + 1) % (dim * dim) == 0) beta = 0.0;
    dir = -next_grad + beta * dir;
    grad = next_grad;
    step = std::min(2.0 * t, 2.0 / std::max(dir.norm(), 1e-12));
    quiet = decrease < tol ? quiet + 1 : 0;
    if (quiet >= 3) {
      res.converged = true;
      ++it;
      break;
    }
  }
  res.unitary = std::move(u);
  res.value = value;
  res.iterations = it;
  return res;
}

}  // namespace qcorr
