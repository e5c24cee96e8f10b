#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qcorr/measures.hpp"
#include "qcorr/states.hpp"

using namespace qcorr;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("qcorr_test_" + name)).string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::vector<std::pair<double, double>> sorted_amplitudes(const PureState& psi) {
  std::vector<std::pair<double, double>> out;
  for (int i = 0; i < psi.dim(); ++i) out.emplace_back(psi.amplitudes()(i).real(), psi.amplitudes()(i).imag());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Ghz, Amplitudes) {
  const PureState g = ghz(2);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(g.amplitudes()(0) - r), 0.0, 1e-15);
  EXPECT_EQ(g.amplitudes()(1), cplx(0.0));
  EXPECT_EQ(g.amplitudes()(2), cplx(0.0));
  EXPECT_NEAR(std::abs(g.amplitudes()(3) - r), 0.0, 1e-15);
  EXPECT_THROW(ghz(1), ArityError);
}

TEST(Ghz, Marginals) {
  for (int q = 0; q < 3; ++q)
    EXPECT_LT((reduced_state(ghz(3), {q}).matrix() - 0.5 * Matrix::Identity(2, 2)).norm(), 1e-15);
  EXPECT_NEAR(ef_two_qubit(reduced_state(ghz(4), {0, 1})), 0.0, 1e-12);
}

TEST(WState, Properties) {
  EXPECT_NEAR(ef_pure(w_state(2), {0}), 1.0, 1e-12);
  EXPECT_NEAR(concurrence_wootters(reduced_state(w_state(3), {0, 2})), 2.0 / 3.0, 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> es(reduced_state(w_state(3), {1}).matrix());
  EXPECT_NEAR(es.eigenvalues()(0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(es.eigenvalues()(1), 2.0 / 3.0, 1e-15);
  EXPECT_THROW(w_state(0), ArityError);
}

TEST(BenchmarkStates, PermutationSymmetric) {
  for (const PureState& psi : {ghz(4), w_state(4)}) {
    const auto reference = sorted_amplitudes(psi);
    for (const std::vector<int>& perm : {std::vector<int>{1, 2, 3, 0}, std::vector<int>{3, 1, 0, 2}})
      EXPECT_EQ(sorted_amplitudes(permute_parties(psi, perm)), reference);
  }
}

TEST(HaarRandom, NormalizedAndDeterministic) {
  const PureState a = haar_random({2, 3, 2}, 42);
  EXPECT_NEAR(a.amplitudes().norm(), 1.0, 1e-12);
  const PureState b = haar_random({2, 3, 2}, 42);
  EXPECT_EQ(a.amplitudes(), b.amplitudes());
  const PureState c = haar_random({2, 3, 2}, 43);
  EXPECT_LT(std::abs(a.amplitudes().dot(c.amplitudes())), 1.0 - 1e-6);
}

TEST(HaarRandom, MarginalPurityMean) {
  double sum = 0.0;
  constexpr int kSamples = 1000;
  for (int s = 0; s < kSamples; ++s) {
    const Matrix rho = reduced_state(haar_random({2, 2}, static_cast<std::uint64_t>(s)), {0}).matrix();
    sum += (rho * rho).trace().real();
  }
  // (d_A + d_B) / (d_A d_B + 1) for d_A = d_B = 2.
  EXPECT_NEAR(sum / kSamples, 4.0 / 5.0, 2e-2);
}

TEST(ProductRandom, HasNoEntanglement) {
  const PureState p = product_random({2, 3, 4}, 9);
  for (int q = 0; q < 3; ++q) EXPECT_NEAR(subset_entropy(p, {q}), 0.0, 1e-9);
}

TEST(StateFile, RoundTrip) {
  const std::string path = temp_path("roundtrip.json");
  for (const PureState& psi : {ghz(3), haar_random({2, 4, 3}, 17)}) {
    write_state(psi, path);
    const PureState back = read_state(path);
    EXPECT_EQ(back.dims(), psi.dims());
    for (int i = 0; i < psi.dim(); ++i) {
      EXPECT_LE(std::abs(back.amplitudes()(i).real() - psi.amplitudes()(i).real()), 1e-15);
      EXPECT_LE(std::abs(back.amplitudes()(i).imag() - psi.amplitudes()(i).imag()), 1e-15);
    }
  }
  std::remove(path.c_str());
}

TEST(StateFile, Rejections) {
  const std::string path = temp_path("bad.json");
  const double r = std::sqrt(0.45);  // norm^2 = 0.9
  write_file(path, "{\"dims\": [2], \"amplitudes\": [[" + std::to_string(r) + ", 0], [" + std::to_string(r) + ", 0]]}");
  EXPECT_THROW(read_state(path), FormatError);
  write_file(path, "{\"dims\": [2, 2], \"amplitudes\": [[1, 0], [0, 0]]}");
  EXPECT_THROW(read_state(path), FormatError);
  write_file(path, "{\"dims\": [2], \"amplitudes\": [[1, 0], [0]]}");
  EXPECT_THROW(read_state(path), FormatError);
  write_file(path, "{\"dims\": [5], \"amplitudes\": [[1, 0], [0, 0], [0, 0], [0, 0], [0, 0]]}");
  EXPECT_THROW(read_state(path), FormatError);
  write_file(path, "not json");
  EXPECT_THROW(read_state(path), FormatError);
  EXPECT_THROW(read_state(temp_path("missing.json")), FormatError);
  std::remove(path.c_str());
}

TEST(StateFile, AcceptsTinyNormSlack) {
  const std::string path = temp_path("slack.json");
  write_file(path, "{\"dims\": [2], \"amplitudes\": [[1.0000000001, 0], [0, 0]]}");
  EXPECT_NEAR(read_state(path).amplitudes().norm(), 1.0, 1e-15);
  std::remove(path.c_str());
}

TEST(StateSpec, Grammar) {
  EXPECT_EQ(StateSpec::parse("ghz:3").make(0).amplitudes(), ghz(3).amplitudes());
  EXPECT_EQ(StateSpec::parse("w:4").dims, (Dims{2, 2, 2, 2}));
  const StateSpec haar = StateSpec::parse("haar:2,3,4");
  EXPECT_TRUE(haar.random());
  EXPECT_EQ(haar.make(5).amplitudes(), haar_random({2, 3, 4}, 5).amplitudes());
  EXPECT_EQ(haar.to_string(), "haar:2,3,4");
  EXPECT_EQ(StateSpec::parse("product:2,2").kind, StateSpec::Kind::ProductRandom);
  EXPECT_EQ(StateSpec::parse("file:/tmp/x.json").path, "/tmp/x.json");
  for (const char* bad : {"ghz", "ghz:1", "ghz:x", "haar:2,9", "haar:", "foo:2", "file:"})
    EXPECT_THROW(StateSpec::parse(bad), FormatError) << bad;
}
