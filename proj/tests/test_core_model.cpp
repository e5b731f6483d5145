#include <gtest/gtest.h>

#include <numbers>

#include "arfima/core_model.hpp"
#include "arfima/errors.hpp"
#include "oracles.hpp"

using namespace arfima;

TEST(FiPiCoeffs, WhiteNoiseIsIdentity) {
  const auto c = fi_pi_coeffs(0.0, 4);
  EXPECT_EQ(c.coeffs, (std::vector<double>{1, 0, 0, 0, 0}));
}

TEST(FiPiCoeffs, FirstCoefficientIsMinusD) {
  for (double d : {-0.7, -0.3, 0.1, 0.45}) EXPECT_DOUBLE_EQ(fi_pi_coeffs(d, 1)[1], -d);
}

TEST(FiPiCoeffs, HandValuesAtPointFour) {
  const auto c = fi_pi_coeffs(0.4, 2);
  EXPECT_NEAR(c[1], -0.4, 1e-15);
  EXPECT_NEAR(c[2], -0.12, 1e-15);
}

TEST(FiPiCoeffs, MatchesGammaFunctionForm) {
  for (double d : {-0.45, -0.2, 0.15, 0.3, 0.45}) {
    const auto c = fi_pi_coeffs(d, 100);
    for (int k = 0; k <= 100; ++k) {
      EXPECT_NEAR(c[k], oracle::pi_coeff_lgamma(d, k), 1e-10) << "d=" << d << " k=" << k;
    }
  }
}

TEST(FiPiCoeffs, NegativeTruncationThrows) {
  EXPECT_THROW(fi_pi_coeffs(0.2, -1), ArgumentError);
  EXPECT_THROW(fi_psi_coeffs(0.2, -1), ArgumentError);
}

TEST(FiPsiCoeffs, Examples) {
  EXPECT_EQ(fi_psi_coeffs(0.0, 3).coeffs, (std::vector<double>{1, 0, 0, 0}));
  EXPECT_DOUBLE_EQ(fi_psi_coeffs(0.25, 1)[1], 0.25);
  const auto c = fi_psi_coeffs(0.4, 2);
  EXPECT_NEAR(c[1], 0.4, 1e-15);
  EXPECT_NEAR(c[2], 0.28, 1e-15);
}

TEST(FiPiCoeffs, ConvolutionWithPsiIsIdentity) {
  const int P = 300;
  for (int j = -9; j <= 9; ++j) {
    const double d = 0.05 * j;
    const auto a = fi_pi_coeffs(d, P).coeffs, b = fi_psi_coeffs(d, P).coeffs;
    for (int k = 0; k <= P; ++k) {
      double s = 0.0;
      for (int i = 0; i <= k; ++i) s += a[i] * b[k - i];
      ASSERT_NEAR(s, k == 0 ? 1.0 : 0.0, 1e-10);
    }
  }
}

TEST(ArfimaPiCoeffs, ReducesToFi) {
  MemoryParams m;
  m.d = 0.3;
  EXPECT_EQ(arfima_pi_coeffs(m, 20).coeffs, fi_pi_coeffs(0.3, 20).coeffs);
}

TEST(ArfimaPiCoeffs, PureAr) {
  MemoryParams m;
  m.phi = {0.5};
  const auto c = arfima_pi_coeffs(m, 2);
  EXPECT_NEAR(c[0], 1.0, 0);
  EXPECT_NEAR(c[1], 0.5, 1e-15);
  EXPECT_NEAR(c[2], 0.0, 1e-15);
}

// Theta(z) pi(z) must equal Phi(z) (1-z)^d term by term; checked by direct
// multiplication rather than the division the implementation uses.
TEST(ArfimaPiCoeffs, MultiplyBackByTheta) {
  std::mt19937_64 eng(7);
  for (int rep = 0; rep < 20; ++rep) {
    MemoryParams m;
    m.d = 0.25;
    m.phi = oracle::random_stationary_phi(1 + rep % 3, eng);
    m.theta = oracle::random_stationary_phi(rep % 3, eng);
    const int P = 40;
    const auto pi = arfima_pi_coeffs(m, P).coeffs;
    std::vector<double> ar{1.0}, ma{1.0};
    ar.insert(ar.end(), m.phi.begin(), m.phi.end());
    ma.insert(ma.end(), m.theta.begin(), m.theta.end());
    for (int k = 0; k <= P; ++k) {
      double lhs = 0.0, rhs = 0.0;
      for (int j = 0; j < static_cast<int>(ma.size()) && j <= k; ++j) lhs += ma[j] * pi[k - j];
      for (int j = 0; j < static_cast<int>(ar.size()) && j <= k; ++j) {
        rhs += ar[j] * oracle::pi_coeff_lgamma(m.d, k - j);
      }
      ASSERT_NEAR(lhs, rhs, 1e-12) << "k=" << k;
    }
  }
}

TEST(ArfimaPiCoeffs, Ar92Example) {
  MemoryParams m;
  m.d = 0.25;
  m.phi = {0.92};
  const auto c = arfima_pi_coeffs(m, 8);
  for (int k = 0; k <= 8; ++k) {
    const double expect =
        oracle::pi_coeff_lgamma(0.25, k) + (k > 0 ? 0.92 * oracle::pi_coeff_lgamma(0.25, k - 1) : 0);
    EXPECT_NEAR(c[k], expect, 1e-12);
  }
}

TEST(ArfimaPiCoeffs, NonInvertibleMaThrows) {
  MemoryParams m;
  m.theta = {1.0};
  EXPECT_THROW(arfima_pi_coeffs(m, 5), DomainError);
}

TEST(AcvFid, WhiteNoise) {
  const auto g = acv_fid(0.0, 5, 1.0);
  EXPECT_NEAR(g[0], 1.0, 1e-15);
  for (int k = 1; k <= 5; ++k) EXPECT_NEAR(g[k], 0.0, 1e-15);
}

TEST(AcvFid, LagOneCorrelation) {
  const auto g = acv_fid(0.25, 1);
  EXPECT_NEAR(g[1] / g[0], 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(acf_fid(0.25, 1), 1.0 / 3.0, 1e-14);
}

TEST(AcvFid, ScalesWithSigmaSquared) {
  const auto a = acv_fid(0.2, 10, 1.0), b = acv_fid(0.2, 10, 3.0);
  for (int k = 0; k <= 10; ++k) EXPECT_NEAR(b[k], 9.0 * a[k], 1e-12);
}

TEST(AcvFid, MatchesSpectralQuadrature) {
  for (double d : {-0.4, -0.25, -0.1, 0.1, 0.3, 0.4}) {
    const auto g = acv_fid(d, 50, 1.3);
    for (int k : {0, 1, 2, 5, 13, 29, 50}) {
      EXPECT_NEAR(g[k], oracle::acv_by_quadrature(d, k, 1.3), 1e-6) << "d=" << d << " k=" << k;
    }
  }
}

TEST(AcvFid, DomainErrors) {
  EXPECT_THROW(acv_fid(0.5, 3), DomainError);
  EXPECT_THROW(acv_fid(-0.6, 3), DomainError);
  EXPECT_THROW(acf_fid(0.5, 1), DomainError);
}

TEST(AcfFid, LagZeroIsOne) {
  for (double d : {-0.3, 0.0, 0.3}) EXPECT_EQ(acf_fid(d, 0), 1.0);
}

TEST(AcfFid, PowerLawTail) {
  const double d = 0.45;
  const double ratio = acf_fid(d, 1024) / acf_fid(d, 512);
  EXPECT_NEAR(ratio / std::pow(2.0, 2 * d - 1), 1.0, 0.02);
}

TEST(SdfArfima, WhiteNoiseFlat) {
  MemoryParams m;
  for (double lam : {0.1, 1.0, std::numbers::pi}) {
    EXPECT_NEAR(sdf_arfima(m, 1.0, lam), 1.0 / (2 * std::numbers::pi), 1e-15);
  }
}

TEST(SdfArfima, FiClosedForm) {
  MemoryParams m;
  m.d = 0.3;
  for (double lam : {0.01, 0.5, 2.0}) {
    EXPECT_NEAR(sdf_arfima(m, 2.0, lam),
                4.0 / (2 * std::numbers::pi) * std::pow(2 * std::sin(lam / 2), -0.6), 1e-12);
  }
}

TEST(SdfArfima, PeaksAtBothEnds) {
  MemoryParams m;
  m.d = 0.25;
  m.phi = {0.92};
  const double mid = sdf_arfima(m, 1.0, std::numbers::pi / 2);
  EXPECT_GT(sdf_arfima(m, 1.0, std::numbers::pi), 10 * mid);
  EXPECT_GT(sdf_arfima(m, 1.0, 0.01), mid);
}

TEST(SdfArfima, ZeroFrequencyWithPositiveD) {
  MemoryParams m;
  m.d = 0.2;
  EXPECT_THROW(sdf_arfima(m, 1.0, 0.0), DomainError);
}

TEST(Monahan, OrderOneIsIdentity) {
  const std::vector<double> v{0.37};
  EXPECT_DOUBLE_EQ(monahan_to_pacf(v)[0], 0.37);
  EXPECT_DOUBLE_EQ(pacf_to_monahan(v)[0], 0.37);
}

TEST(Monahan, HandExample) {
  const std::vector<double> phi{0.5, 0.2};
  const auto v = monahan_to_pacf(phi);
  EXPECT_NEAR(v[0], 0.5 / 1.2, 1e-15);
  EXPECT_NEAR(v[1], 0.2, 1e-15);
  const auto back = pacf_to_monahan(v);
  EXPECT_NEAR(back[0], 0.5, 1e-15);
  EXPECT_NEAR(back[1], 0.2, 1e-15);
}

TEST(Monahan, RoundTripBothWays) {
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> U(-0.95, 0.95);
  for (int i = 0; i < 1000; ++i) {
    const int p = 1 + i % 5;
    const auto phi = oracle::random_stationary_phi(p, eng);
    const auto b = pacf_to_monahan(monahan_to_pacf(phi));
    for (int k = 0; k < p; ++k) ASSERT_NEAR(b[k], phi[k], 1e-12);
    std::vector<double> v(p);
    for (auto& e : v) e = U(eng);
    const auto vb = monahan_to_pacf(pacf_to_monahan(v));
    for (int k = 0; k < p; ++k) ASSERT_NEAR(vb[k], v[k], 1e-12);
  }
}

TEST(Monahan, OutsideRegion) {
  EXPECT_THROW(monahan_to_pacf(std::vector<double>{1.0}), DomainError);
  EXPECT_THROW(monahan_to_pacf(std::vector<double>{0.5, 1.2}), DomainError);
  EXPECT_THROW(pacf_to_monahan(std::vector<double>{0.2, -1.0}), ArgumentError);
}

// Truncating the PACF vector shrinks the low-lag autocovariances by the
// common factor 1 - v_p^2, so the autocorrelations agree.
TEST(Monahan, TruncationPreservesYuleWalkerStructure) {
  std::mt19937_64 eng(5);
  std::uniform_real_distribution<double> U(-0.9, 0.9);
  for (int i = 0; i < 200; ++i) {
    const int p = 1 + i % 5;
    std::vector<double> v(p);
    for (auto& e : v) e = U(eng);
    const auto g = oracle::ar_acv_yule_walker(pacf_to_monahan(v));
    const auto gs =
        oracle::ar_acv_yule_walker(pacf_to_monahan(std::span<const double>(v.data(), p - 1)));
    const double f = 1 - v.back() * v.back();
    for (int k = 0; k < p; ++k) {
      ASSERT_NEAR(gs[k], g[k] * f, 1e-10 * std::max(1.0, std::abs(g[k])));
      ASSERT_NEAR(gs[k] / gs[0], g[k] / g[0], 1e-10);
    }
  }
}

TEST(StationaryInvertible, Examples) {
  MemoryParams m;
  m.d = 0.25;
  m.phi = {0.92};
  EXPECT_TRUE(is_stationary_invertible(m));
  m.d = 0.6;
  EXPECT_FALSE(is_stationary_invertible(m));
  MemoryParams u;
  u.phi = {1.0};
  EXPECT_FALSE(is_stationary_invertible(u));
  MemoryParams ma;
  ma.theta = {-1.5};
  EXPECT_FALSE(is_stationary_invertible(ma));
}

TEST(Reparam, RoundTripAndFlatten) {
  ReparamMemory r;
  r.d = 0.1;
  r.varphi = {0.3, -0.5};
  r.vartheta = {0.7};
  const auto back = to_reparam(to_memory(r));
  EXPECT_NEAR(back.d, 0.1, 0);
  for (int k = 0; k < 2; ++k) EXPECT_NEAR(back.varphi[k], r.varphi[k], 1e-14);
  EXPECT_NEAR(back.vartheta[0], 0.7, 1e-14);
  const auto flat = r.flatten();
  EXPECT_EQ(flat, (std::vector<double>{0.1, 0.3, -0.5, 0.7}));
  const auto u = ReparamMemory::unflatten(flat, 2, 1);
  EXPECT_EQ(u.varphi, r.varphi);
  EXPECT_EQ(u.vartheta, r.vartheta);
}

TEST(InnovationSpec, Validation) {
  InnovationSpec g;
  EXPECT_NO_THROW(g.validate());
  g.sigma = 0.0;
  EXPECT_ANY_THROW(g.validate());
  InnovationSpec t;
  t.family = InnovationFamily::student_t;
  t.shape = {2.0};
  EXPECT_ANY_THROW(t.validate());
  t.shape = {5.0};
  EXPECT_NO_THROW(t.validate());
}
