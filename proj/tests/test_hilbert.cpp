#include <gtest/gtest.h>

#include <cmath>

#include "qcorr/hilbert.hpp"
#include "qcorr/states.hpp"

using namespace qcorr;

namespace {

// h(1/3) to 20 digits from an independent arbitrary-precision evaluation.
constexpr double kH13 = 0.91829583405448951479;

Matrix random_density(int dim, int rank, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix g = gaussian_matrix(dim, rank, rng);
  Matrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

// Partial trace by explicit index arithmetic over qubits, kept set given as
// a bit mask (subsystem 0 is the most significant bit).
Matrix brute_partial_trace(const Matrix& rho, int n, unsigned keep) {
  std::vector<int> kept;
  for (int i = 0; i < n; ++i)
    if (keep & (1u << i)) kept.push_back(i);
  const int k = static_cast<int>(kept.size());
  Matrix out = Matrix::Zero(1 << k, 1 << k);
  const auto bit = [&](int index, int party) { return (index >> (n - 1 - party)) & 1; };
  for (int i = 0; i < (1 << n); ++i)
    for (int j = 0; j < (1 << n); ++j) {
      bool same = true;
      for (int p = 0; p < n; ++p)
        if (!(keep & (1u << p)) && bit(i, p) != bit(j, p)) same = false;
      if (!same) continue;
      int a = 0;
      int b = 0;
      for (int q = 0; q < k; ++q) {
        a = 2 * a + bit(i, kept[q]);
        b = 2 * b + bit(j, kept[q]);
      }
      out(a, b) += rho(i, j);
    }
  return out;
}

}  // namespace

TEST(SubsystemSet, SortsAndRejectsDuplicates) {
  const SubsystemSet s{3, 1, 2};
  EXPECT_EQ(s.indices(), (std::vector<int>{1, 2, 3}));
  EXPECT_THROW(SubsystemSet({1, 1}), InvalidPartition);
  EXPECT_THROW(SubsystemSet({-1}), InvalidPartition);
}

TEST(SubsystemSet, SetAlgebra) {
  const SubsystemSet a{0, 2};
  const SubsystemSet b{1, 2};
  EXPECT_EQ((a | b), (SubsystemSet{0, 1, 2}));
  EXPECT_EQ((a & b), (SubsystemSet{2}));
  EXPECT_EQ(a.complement(4), (SubsystemSet{1, 3}));
  EXPECT_FALSE(a.disjoint(b));
  EXPECT_EQ(SubsystemSet::from_mask(a.mask()), a);
  EXPECT_EQ((SubsystemSet{2, 4}).relative_to(SubsystemSet{1, 2, 4}), (SubsystemSet{1, 2}));
}

TEST(PureState, RejectsBadInput) {
  Vector amp = Vector::Zero(4);
  amp(0) = 1.0;
  EXPECT_NO_THROW(PureState({2, 2}, amp));
  EXPECT_THROW(PureState({2, 3}, amp), DimensionError);
  EXPECT_THROW(PureState({2, 5}, Vector::Zero(10)), DimensionError);
  EXPECT_THROW(PureState({1, 4}, amp), DimensionError);
  amp(0) = 0.9;
  EXPECT_THROW(PureState({2, 2}, amp), DimensionError);
}

TEST(DensityMatrix, ValidatesInvariants) {
  EXPECT_NO_THROW(DensityMatrix({2, 2}, random_density(4, 3, 1)));
  Matrix not_hermitian = random_density(4, 4, 2);
  not_hermitian(0, 1) += cplx(0.0, 1e-3);
  EXPECT_THROW(DensityMatrix({2, 2}, not_hermitian), DimensionError);
  EXPECT_THROW(DensityMatrix({2, 2}, 2.0 * random_density(4, 4, 3)), DimensionError);
  Matrix negative = Matrix::Zero(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  EXPECT_THROW(DensityMatrix({2}, negative), DimensionError);
}

TEST(TensorProduct, DimensionsAndTrace) {
  const DensityMatrix a({2}, random_density(2, 2, 4));
  const DensityMatrix b({3}, random_density(3, 2, 5));
  const DensityMatrix ab = tensor_product(a, b);
  EXPECT_EQ(ab.dims(), (Dims{2, 3}));
  EXPECT_NEAR(ab.matrix().trace().real(), 1.0, 1e-12);
  EXPECT_LT((partial_trace(ab, {0}).matrix() - a.matrix()).norm(), 1e-12);
  EXPECT_LT((partial_trace(ab, {1}).matrix() - b.matrix()).norm(), 1e-12);
}

TEST(PartialTrace, MatchesBruteForceOnQubits) {
  const PureState psi = haar_random({2, 2, 2, 2}, 11);
  const Matrix full = psi.amplitudes() * psi.amplitudes().adjoint();
  const DensityMatrix rho({2, 2, 2, 2}, full);
  for (unsigned mask = 1; mask < 15; ++mask) {
    const SubsystemSet keep = SubsystemSet::from_mask(mask);
    const Matrix expected = brute_partial_trace(full, 4, mask);
    EXPECT_LT((partial_trace(rho, keep).matrix() - expected).norm(), 1e-12) << keep.to_string();
    EXPECT_LT((reduced_state(psi, keep).matrix() - expected).norm(), 1e-12) << keep.to_string();
  }
}

TEST(PartialTrace, Composes) {
  const PureState psi = haar_random({2, 3, 2, 2}, 12);
  const DensityMatrix rho = DensityMatrix::projector(psi);
  const DensityMatrix two_steps = partial_trace(partial_trace(rho, {0, 1, 3}), {0, 2});
  const DensityMatrix direct = partial_trace(rho, {0, 3});
  EXPECT_LT((two_steps.matrix() - direct.matrix()).norm(), 1e-12);
}

TEST(Entropy, KnownSpectra) {
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::maximally_mixed({2, 2})), 2.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::maximally_mixed({3})), std::log2(3.0), 1e-12);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::projector(haar_random({2, 3}, 1))), 0.0, 1e-9);
  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 2.0 / 3.0;
  diag(1, 1) = 1.0 / 3.0;
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix({2}, diag)), kH13, 1e-14);
}

TEST(Entropy, PurityComplementSymmetry) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PureState psi = haar_random({2, 3, 2, 4}, seed);
    const DensityMatrix rho = DensityMatrix::projector(psi);
    for (unsigned mask = 1; mask < 15; ++mask) {
      const SubsystemSet a = SubsystemSet::from_mask(mask);
      const double sa = von_neumann_entropy(partial_trace(rho, a));
      const double sb = von_neumann_entropy(partial_trace(rho, a.complement(4)));
      EXPECT_NEAR(sa, sb, 1e-10);
      EXPECT_NEAR(subset_entropy(psi, a), sa, 1e-10);
    }
  }
}

TEST(Entropy, StrongSubadditivity) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const PureState psi = haar_random({2, 2, 2, 2}, 100 + seed);
    // S_AB + S_BC >= S_B + S_ABC for A = {0}, B = {1}, C = {2}, with 3 the purifier.
    const double lhs = subset_entropy(psi, {0, 1}) + subset_entropy(psi, {1, 2});
    const double rhs = subset_entropy(psi, {1}) + subset_entropy(psi, {0, 1, 2});
    EXPECT_GE(lhs - rhs, -1e-12);
  }
}

TEST(Entropy, ConditionalAndMutualInformation) {
  const PureState w = w_state(3);
  // S_{a|b} = S_ab - S_b = S_c - S_b = 0 for the symmetric W state.
  EXPECT_NEAR(conditional_entropy(w, {0}, {1}), 0.0, 1e-12);
  const DensityMatrix rho_ab = reduced_state(w, {0, 1});
  EXPECT_NEAR(mutual_information(rho_ab, {0}, {1}), kH13, 1e-12);
  EXPECT_THROW(mutual_information(rho_ab, {0}, {0}), InvalidPartition);
}

TEST(Permutation, MovesParties) {
  const PureState psi = haar_random({2, 3, 4}, 5);
  const PureState moved = permute_parties(psi, {2, 0, 1});
  EXPECT_EQ(moved.dims(), (Dims{3, 4, 2}));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 4; ++c) EXPECT_EQ(moved.amplitudes()((b * 4 + c) * 2 + a), psi.amplitudes()((a * 3 + b) * 4 + c));
  EXPECT_NEAR(subset_entropy(moved, {2}), subset_entropy(psi, {0}), 1e-12);
  EXPECT_THROW(permute_parties(psi, {0, 0, 1}), InvalidPartition);
}
