#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "alq/mat_core.hpp"
#include "alq/sim.hpp"
#include "oracles.hpp"

using namespace alq;

namespace {

Mat hamiltonian_41() {
  const AugmentedSystem sys = augment(plant_sec4_1(), 1.0);
  return build_hamiltonian(sys, {Mat::identity(3), Mat::identity(1)});
}

bool has_eig(const Spectrum& s, double re, double im, double tol) {
  return std::any_of(s.eigenvalues.begin(), s.eigenvalues.end(), [&](const auto& e) {
    return std::abs(e.real() - re) <= tol && std::abs(e.imag() - im) <= tol;
  });
}

}  // namespace

TEST(Det, IdentityIsOne) { EXPECT_DOUBLE_EQ(det(Mat::identity(3)), 1.0); }

TEST(Det, DiagonalProduct) { EXPECT_DOUBLE_EQ(det(Mat{{2, 0}, {0, 3}}), 6.0); }

TEST(Det, LuMatchesLaplaceOnRandom5x5) {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat m = oracle::random_mat(g, 5, 5);
    const double ref = oracle::laplace_det(m);
    EXPECT_NEAR(det(m), ref, 1e-10 * std::abs(ref));
  }
}

TEST(Det, NonSquareIsDimensionError) {
  try {
    det(Mat(2, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Dimension);
  }
}

TEST(Adjugate, IdentityMapsToIdentity) {
  for (std::size_t n = 1; n <= 6; ++n) EXPECT_EQ(adjugate(Mat::identity(n)), Mat::identity(n));
}

TEST(Adjugate, TwoByTwoClosedForm) {
  EXPECT_EQ(adjugate(Mat{{1, 2}, {3, 4}}), (Mat{{4, -2}, {-3, 1}}));
}

TEST(Adjugate, SingularTwoByTwo) {
  const Mat m{{1, 2}, {2, 4}};
  const Mat a = adjugate(m);
  EXPECT_EQ(a, (Mat{{4, -2}, {-2, 1}}));
  EXPECT_EQ(a * m, Mat(2, 2));
}

TEST(Adjugate, MatchesBruteForceAndAdjTimesMIsDetI) {
  std::mt19937_64 g(7);
  for (std::size_t n = 2; n <= 6; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      Mat m = oracle::random_mat(g, n, n);
      if (trial == 0) {
        // rank-deficient: duplicate a row
        for (std::size_t j = 0; j < n; ++j) m(n - 1, j) = m(0, j);
      }
      if (trial == 1 && n >= 3) {
        // rank n-2
        for (std::size_t j = 0; j < n; ++j) m(n - 1, j) = m(0, j), m(n - 2, j) = 2 * m(1, j);
      }
      const Mat a = adjugate(m);
      const Mat ref = oracle::brute_adjugate(m);
      const double scale = std::max(1.0, ref.max_abs());
      EXPECT_LE(oracle::max_abs_diff(a, ref), 1e-9 * scale) << "n=" << n << " trial=" << trial;
      const Mat lhs = a * m;
      const Mat rhs = Mat::identity(n) * det(m);
      EXPECT_LE(oracle::max_abs_diff(lhs, rhs), 1e-9 * std::max(1.0, lhs.max_abs())) << "n=" << n;
      EXPECT_LE(oracle::max_abs_diff(m * a, rhs), 1e-9 * std::max(1.0, lhs.max_abs())) << "n=" << n;
    }
  }
}

TEST(Adjugate, ProductsMatchExplicitAdjugate) {
  std::mt19937_64 g(8);
  for (std::size_t n = 2; n <= 5; ++n) {
    Mat m = oracle::random_mat(g, n, n);
    const Mat x = oracle::random_mat(g, n, 2);
    const Mat a = oracle::random_mat(g, 3, n);
    EXPECT_LE(oracle::max_abs_diff(adj_times(m, x), oracle::brute_adjugate(m) * x), 1e-10);
    EXPECT_LE(oracle::max_abs_diff(times_adj(a, m), a * oracle::brute_adjugate(m)), 1e-10);
    for (std::size_t j = 0; j < n; ++j) m(n - 1, j) = 0.0;  // exactly singular
    EXPECT_LE(oracle::max_abs_diff(adj_times(m, x), oracle::brute_adjugate(m) * x), 1e-10);
  }
}

TEST(Adjugate, ScalingIdentities) {
  std::mt19937_64 g(3);
  for (double c : {0.5, 2.0, -0.5, -2.0}) {
    const Mat m = oracle::random_mat(g, 3, 3);
    EXPECT_NEAR(det(m * c), c * c * c * det(m), 1e-12 * std::max(1.0, std::abs(det(m))));
    EXPECT_LE(oracle::max_abs_diff(adjugate(m * c), adjugate(m) * (c * c)), 1e-12 * std::max(1.0, adjugate(m).max_abs()));
  }
}

TEST(MatExpTaylor, ZeroMatrixGivesIdentity) {
  for (int p : {0, 1, 7, 40}) EXPECT_EQ(mat_exp_taylor(Mat(4, 4), 3.0, p), Mat::identity(4));
}

TEST(MatExpTaylor, ScalarExponential) {
  for (double a : {-1.3, 0.4, 2.0})
    EXPECT_NEAR(mat_exp_taylor(Mat{{a}}, 1.5, 80)(0, 0), std::exp(a * 1.5), 1e-12 * std::exp(std::abs(a) * 1.5));
}

TEST(MatExpTaylor, Sec41TauSevenPThirtyFive) {
  const Mat D = hamiltonian_41();
  const double eps = frobenius_norm(mat_exp_oracle(D, 7.0) - mat_exp_taylor(D, 7.0, 35));
  EXPECT_NEAR(eps, 2.234e-8, 0.2 * 2.234e-8);
}

TEST(MatExpTaylor, OverflowNamesTermIndex) {
  try {
    mat_exp_taylor(Mat::identity(2) * 1e200, 1.0, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Overflow);
    EXPECT_NE(std::string(e.what()).find("k=2"), std::string::npos) << e.what();
  }
}

TEST(MatExpOracle, ZeroGivesIdentity) { EXPECT_EQ(mat_exp_oracle(Mat(3, 3), 2.0), Mat::identity(3)); }

TEST(MatExpOracle, DiagonalExponential) {
  const Mat e = mat_exp_oracle(Mat{{1, 0}, {0, 2}}, 1.0);
  EXPECT_NEAR(e(0, 0), std::exp(1.0), 1e-12);
  EXPECT_NEAR(e(1, 1), std::exp(2.0), 1e-12);
  EXPECT_EQ(e(0, 1), 0.0);
  EXPECT_EQ(e(1, 0), 0.0);
}

TEST(MatExpOracle, AgreesWithTaylorOnSmallNorms) {
  std::mt19937_64 g(21);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Mat d = oracle::random_mat(g, 4, 4);
    const double tau = 0.7;
    d *= u(g) / (frobenius_norm(d) * tau);
    EXPECT_LE(frobenius_norm(mat_exp_oracle(d, tau) - mat_exp_taylor(d, tau, 25)), 1e-12);
  }
}

TEST(MatExpOracle, SemigroupProperty) {
  std::mt19937_64 g(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat d = oracle::random_mat(g, 4, 4);
    const Mat lhs = mat_exp_oracle(d, 0.9);
    const Mat rhs = mat_exp_oracle(d, 0.4) * mat_exp_oracle(d, 0.5);
    EXPECT_LE(oracle::max_abs_diff(lhs, rhs), 1e-9 * std::max(1.0, lhs.max_abs()));
  }
  const Mat D = hamiltonian_41();
  const Mat lhs = mat_exp_oracle(D, 7.0);
  EXPECT_LE(oracle::max_abs_diff(lhs, mat_exp_oracle(D, 3.0) * mat_exp_oracle(D, 4.0)), 1e-9 * lhs.max_abs());
}

TEST(MatExpOracle, OverflowReported) {
  try {
    mat_exp_oracle(Mat::identity(2) * 1000.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Overflow);
  }
}

TEST(TaylorBound, ZeroMatrix) { EXPECT_EQ(taylor_remainder_bound(Mat(3, 3), 2.0, 10), 0.0); }

TEST(TaylorBound, HoldsOnRandomMatrices) {
  std::mt19937_64 g(99);
  std::uniform_real_distribution<double> u(2.0, 3.0);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Mat d = oracle::random_mat(g, 4, 4);
    const double tau = 1.3;
    d *= u(g) / (frobenius_norm(d) * tau);
    const Mat ref = mat_exp_oracle(d, tau);
    for (int p : {5, 10, 20})
      if (frobenius_norm(ref - mat_exp_taylor(d, tau, p)) > taylor_remainder_bound(d, tau, p)) ++violations;
  }
  EXPECT_EQ(violations, 0);
}

TEST(TaylorBound, MonotoneTailOnSec41Hamiltonian) {
  const Mat D = hamiltonian_41();
  const double tau = 7.0;
  const int p0 = static_cast<int>(std::ceil(frobenius_norm(D) * tau));
  for (int p = p0; p < p0 + 60; ++p)
    EXPECT_LE(taylor_remainder_bound(D, tau, p + 1), taylor_remainder_bound(D, tau, p)) << "p=" << p;
  EXPECT_LT(taylor_remainder_bound(D, tau, 200), 1e-40);
}

TEST(TaylorBound, LargeDegreeStaysFinite) {
  const double b = taylor_remainder_bound(hamiltonian_41(), 7.0, 85);
  EXPECT_TRUE(std::isfinite(b));
  EXPECT_GT(b, 0.0);
}

TEST(Eigenvalues, Diagonal) {
  const Spectrum s = eigenvalues(Mat{{1, 0, 0}, {0, 2, 0}, {0, 0, 3}});
  ASSERT_EQ(s.eigenvalues.size(), 3u);
  for (double v : {1.0, 2.0, 3.0}) EXPECT_TRUE(has_eig(s, v, 0.0, 1e-12));
}

TEST(Eigenvalues, Sec41Hamiltonian) {
  const Spectrum s = eigenvalues(hamiltonian_41());
  ASSERT_EQ(s.eigenvalues.size(), 6u);
  for (double re : {0.79, -0.79})
    for (double im : {0.92, -0.92}) EXPECT_TRUE(has_eig(s, re, im, 0.01));
  EXPECT_TRUE(has_eig(s, 0.67, 0.0, 0.01));
  EXPECT_TRUE(has_eig(s, -0.67, 0.0, 0.01));
}

TEST(Eigenvalues, Sec42HamiltonianVartheta100) {
  const AugmentedSystem sys = augment(plant_sec4_2(), 100.0);
  const Spectrum s = eigenvalues(build_hamiltonian(sys, {Mat::identity(4), Mat::identity(1)}));
  for (double v : {29.27, -29.27, 7.11, -7.11}) EXPECT_TRUE(has_eig(s, v, 0.0, 0.01));
  for (double re : {3.44, -3.44})
    for (double im : {5.55, -5.55}) EXPECT_TRUE(has_eig(s, re, im, 0.01));
}

TEST(Eigenvalues, ConjugatePairsOfRealMatrices) {
  std::mt19937_64 g(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Spectrum s = eigenvalues(oracle::random_mat(g, 6, 6));
    ASSERT_EQ(s.eigenvalues.size(), 6u);
    for (const auto& e : s.eigenvalues)
      if (std::abs(e.imag()) > 1e-12) EXPECT_TRUE(has_eig(s, e.real(), -e.imag(), 1e-9));
  }
}

TEST(Norms, Identity) {
  const Norms n = norms(Mat::identity(3));
  EXPECT_NEAR(n.spectral, 1.0, 1e-10);
  EXPECT_DOUBLE_EQ(n.frobenius, std::sqrt(3.0));
}

TEST(Norms, RankOneOuterProduct) {
  const Mat u{{1.0}, {-2.0}, {0.5}, {3.0}};
  EXPECT_NEAR(norms(u * u.transpose()).spectral, (u.transpose() * u)(0, 0), 1e-9);
}

TEST(Norms, EquivalenceOnRandom4x4) {
  std::mt19937_64 g(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Norms n = norms(oracle::random_mat(g, 4, 4));
    EXPECT_LE(n.spectral, n.frobenius * (1 + 1e-12));
    EXPECT_LE(n.frobenius, 2.0 * n.spectral * (1 + 1e-9));
  }
}

TEST(Norms, SpectralMatchesLargestSingularValue) {
  std::mt19937_64 g(13);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat m = oracle::random_mat(g, 4, 4);
    double smax = 0;
    for (const auto& e : eigenvalues(m.transpose() * m).eigenvalues) smax = std::max(smax, e.real());
    EXPECT_NEAR(spectral_norm(m), std::sqrt(smax), 1e-8 * std::sqrt(smax));
  }
}
