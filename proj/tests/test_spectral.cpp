#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "basinscope/spectral.hpp"
#include "systems.hpp"

using namespace basinscope;

namespace {

RMatrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  RMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t k = 0;
    for (double v : r) m(i, k++) = v;
    ++i;
  }
  return m;
}

double max_diff(const CMatrix& a, const CMatrix& b) { return max_abs(a - b); }

CMatrix diag(const std::vector<Complex>& l) {
  CMatrix d(l.size(), l.size());
  for (std::size_t i = 0; i < l.size(); ++i) d(i, i) = l[i];
  return d;
}

}  // namespace

TEST(Jacobian, VanDerPol) {
  const RMatrix A = jacobian_at_origin(testsys::vanderpol());
  EXPECT_EQ(A(0, 0), 0.0);
  EXPECT_EQ(A(0, 1), -1.0);
  EXPECT_EQ(A(1, 0), 1.0);
  EXPECT_EQ(A(1, 1), -1.0);
}

TEST(Jacobian, ScalarAndExample1) {
  EXPECT_EQ(jacobian_at_origin(testsys::linear1d(2.5))(0, 0), -2.5);
  const RMatrix A = jacobian_at_origin(testsys::example1(1.5, 0.7, -0.4));
  EXPECT_EQ(A(0, 0), -1.5);
  EXPECT_EQ(A(1, 1), -1.5);
  EXPECT_EQ(A(0, 1), 0.0);
  EXPECT_EQ(A(1, 0), 0.0);
}

TEST(Diagonalize, VanDerPolEigenvalues) {
  const SpectralData s = diagonalize(mat({{0, -1}, {1, -1}}));
  ASSERT_EQ(s.eigenvalues.size(), 2u);
  // Characteristic polynomial l^2 + l + 1 (trace -1, det 1).
  const Complex expect[2] = {{-0.5, std::sqrt(3.0) / 2}, {-0.5, -std::sqrt(3.0) / 2}};
  for (int i = 0; i < 2; ++i) EXPECT_LT(std::abs(s.eigenvalues[i] - expect[i]), 1e-14);
  // Conjugate columns, unit norm, leading entry real positive.
  for (std::size_t i = 0; i < 2; ++i) EXPECT_LT(std::abs(s.S(i, 1) - std::conj(s.S(i, 0))), 1e-15);
  for (std::size_t c = 0; c < 2; ++c) {
    double n = 0;
    for (std::size_t i = 0; i < 2; ++i) n += std::norm(s.S(i, c));
    EXPECT_NEAR(n, 1.0, 1e-14);
    EXPECT_GT(s.S(0, c).real(), 0.0);
    EXPECT_EQ(s.S(0, c).imag(), 0.0);
  }
  EXPECT_LT(max_abs(s.S * s.S_inv - CMatrix::identity(2)), 1e-10);
  EXPECT_LT(max_diff(s.S_inv * to_complex(mat({{0, -1}, {1, -1}})) * s.S, diag(s.eigenvalues)), 1e-8);
}

TEST(Diagonalize, MinusIdentity) {
  const SpectralData s = diagonalize(mat({{-1, 0}, {0, -1}}));
  EXPECT_EQ(s.eigenvalues[0], Complex(-1.0));
  EXPECT_EQ(s.eigenvalues[1], Complex(-1.0));
  EXPECT_LT(max_abs(s.S - CMatrix::identity(2)), 1e-15);
}

TEST(Diagonalize, RandomThreeByThreeReconstruction) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int done = 0;
  for (int trial = 0; trial < 40; ++trial) {
    RMatrix A(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t k = 0; k < 3; ++k) A(i, k) = u(rng);
    for (std::size_t i = 0; i < 3; ++i) A(i, i) -= 2.5;  // Gershgorin: Hurwitz
    const SpectralData s = diagonalize(A);
    const CMatrix recon = s.S * diag(s.eigenvalues) * s.S_inv;
    EXPECT_LT(max_diff(recon, to_complex(A)), 1e-8);
    for (std::size_t i = 1; i < 3; ++i) {
      const auto& a = s.eigenvalues[i - 1];
      const auto& b = s.eigenvalues[i];
      EXPECT_TRUE(a.real() > b.real() || (a.real() == b.real() && a.imag() >= b.imag())) << a << " " << b;
    }
    ++done;
  }
  EXPECT_EQ(done, 40);
}

TEST(Diagonalize, RepeatedEigenvalueWithFullEigenspace) {
  const SpectralData s = diagonalize(mat({{-2, 0, 0}, {0, -1, 0}, {0, 0, -2}}));
  EXPECT_LT(max_diff(s.S * diag(s.eigenvalues) * s.S_inv,
                     to_complex(mat({{-2, 0, 0}, {0, -1, 0}, {0, 0, -2}}))),
            1e-12);
}

TEST(Diagonalize, RejectsNonHurwitz) {
  EXPECT_THROW(diagonalize(mat({{1}})), NotHurwitz);
  EXPECT_THROW(diagonalize(mat({{0, 1}, {-1, 0}})), NotHurwitz);  // centre
  EXPECT_THROW(diagonalize(mat({{-1, 0}, {0, 0.5}})), NotHurwitz);
}

TEST(Diagonalize, RejectsJordanBlock) {
  EXPECT_THROW(diagonalize(mat({{-1, 1}, {0, -1}})), NotDiagonalizable);
  EXPECT_THROW(diagonalize(mat({{-2, 1, 0}, {0, -2, 1}, {0, 0, -2}})), NotDiagonalizable);
}

TEST(Diagonalize, RejectsIllConditionedBasis) {
  // Distinct but nearly parallel eigenvectors.
  EXPECT_THROW(diagonalize(mat({{-1, 1}, {0, -1 - 1e-11}})), NotDiagonalizable);
}

TEST(Transform, RadialExampleKeepsField) {
  const SpectralData s = analyze(testsys::radial());
  EXPECT_LT(max_abs(s.S - CMatrix::identity(2)), 1e-15);
  EXPECT_EQ(s.g[0].coefficient(MultiIndex{1, 1}), Complex(-1.0));
  EXPECT_EQ(s.g[1].coefficient(MultiIndex{1, 1}), Complex(1.0));
  EXPECT_EQ(s.g[0].coefficient(MultiIndex{1, 0}), Complex(-1.0));
  EXPECT_EQ(s.g[0].coefficient(MultiIndex{0, 1}), Complex(0.0));
}

TEST(Transform, LinearSystemIsDiagonal) {
  using testsys::poly;
  const PolySystem sys({poly(2, {{0, {1, 0}}, {-1, {0, 1}}}), poly(2, {{2, {1, 0}}, {-3, {0, 1}}})});
  const SpectralData s = analyze(sys);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(s.g[i].size(), 1u);
    MultiIndex e(2);
    e[i] = 1;
    EXPECT_EQ(s.g[i].coefficient(e), s.eigenvalues[i]);
  }
}

TEST(Transform, VanDerPolPointwiseComposition) {
  const PolySystem sys = testsys::vanderpol();
  const SpectralData s = analyze(sys);
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const Complex z[2] = {{u(rng), u(rng)}, {u(rng), u(rng)}};
    const Complex x[2] = {s.S(0, 0) * z[0] + s.S(0, 1) * z[1], s.S(1, 0) * z[0] + s.S(1, 1) * z[1]};
    const Complex fx[2] = {sys.components[0].evaluate(x), sys.components[1].evaluate(x)};
    const Complex gz[2] = {s.g[0].evaluate(z), s.g[1].evaluate(z)};
    for (std::size_t i = 0; i < 2; ++i) {
      const Complex sg = s.S(i, 0) * gz[0] + s.S(i, 1) * gz[1];
      EXPECT_LT(std::abs(fx[i] - sg), 1e-10);
    }
  }
  // Linear part snapped exactly.
  EXPECT_EQ(s.g[0].coefficient(MultiIndex{1, 0}), s.eigenvalues[0]);
  EXPECT_EQ(s.g[0].coefficient(MultiIndex{0, 1}), Complex(0.0));
}

TEST(Transform, ResonanceSumsNonzero) {
  // Hurwitz implies Re(sum j_i lambda_i) < 0 for every |j| >= 2.
  const SpectralData s = analyze(testsys::vanderpol());
  for (int m = 2; m <= 20; ++m)
    for (const auto& j : indices_of_degree(2, m)) {
      Complex sum = 0.0;
      for (std::size_t i = 0; i < 2; ++i) sum += double(j[i]) * s.eigenvalues[i];
      EXPECT_LT(sum.real(), 0.0);
    }
}

TEST(PolySystem, ValidateRejectsBadInput) {
  using testsys::poly;
  EXPECT_THROW(PolySystem({poly(1, {{1, {0}}, {-1, {1}}})}).validate(), std::invalid_argument);
  EXPECT_THROW(PolySystem({poly(2, {{-1, {1, 0}}})}).validate(), std::invalid_argument);
}
