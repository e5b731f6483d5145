#include <gtest/gtest.h>

#include "arfima/errors.hpp"
#include "arfima/simulate.hpp"
#include "oracles.hpp"

using namespace arfima;

namespace {

// Sample autocovariances about `m`; pass the true mean when it is known,
// since under long memory the sample-mean correction biases them down.
std::vector<double> sample_acv(const std::vector<double>& x, int maxlag, double m) {
  std::vector<double> g(maxlag + 1, 0.0);
  for (int k = 0; k <= maxlag; ++k) {
    for (std::size_t t = k; t < x.size(); ++t) g[k] += (x[t] - m) * (x[t - k] - m);
    g[k] /= static_cast<double>(x.size());
  }
  return g;
}

// |P(e^{-i lam})|^2 for P(z) = 1 + sum c_k z^k.
double poly_mod2(const std::vector<double>& c, double lam) {
  std::complex<double> s = 1.0;
  for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * std::polar(1.0, -lam * (k + 1.0));
  return std::norm(s);
}

}  // namespace

TEST(Simulate, FiPathMatchesExactGenerator) {
  SimSpec spec;
  spec.n = 300;
  spec.memory.d = 0.3;
  spec.mu = 2.0;
  spec.innovation.sigma = 1.5;
  spec.seed = 77;
  EXPECT_EQ(simulate_arfima(spec), simulate_fid_exact(300, 0.3, 2.0, 1.5, 77));
}

TEST(Simulate, Deterministic) {
  SimSpec spec;
  spec.n = 200;
  spec.memory.d = 0.1;
  spec.memory.phi = {0.5};
  spec.memory.theta = {-0.3};
  spec.innovation.family = InnovationFamily::student_t;
  spec.innovation.shape = {4.0};
  EXPECT_EQ(simulate_arfima(spec), simulate_arfima(spec));
  auto other = spec;
  other.seed = 2;
  EXPECT_NE(simulate_arfima(spec), simulate_arfima(other));
}

TEST(Simulate, FiLagOneCorrelation) {
  // rho(1) = d / (1 - d)
  const double d = 0.25;
  double acc = 0.0;
  const int R = 200;
  for (int r = 0; r < R; ++r) {
    const auto g = sample_acv(simulate_fid_exact(1024, d, 0.0, 1.0, 1000 + r), 1, 0.0);
    acc += g[1] / g[0];
  }
  EXPECT_NEAR(acc / R, d / (1 - d), 0.02);
}

TEST(Simulate, ArfimaAutocovarianceMatchesSpectrum) {
  SimSpec spec;
  spec.n = 2048;
  spec.memory.d = -0.2;
  spec.memory.phi = {-0.5};
  spec.memory.theta = {0.4};
  spec.innovation.sigma = 1.0;
  const int R = 100, L = 3;
  std::vector<double> acc(L + 1, 0.0);
  for (int r = 0; r < R; ++r) {
    spec.seed = 500 + r;
    const auto g = sample_acv(simulate_arfima(spec), L, 0.0);
    for (int k = 0; k <= L; ++k) acc[k] += g[k] / R;
  }
  auto sdf = [&](double lam) {
    return poly_mod2(spec.memory.theta, lam) / poly_mod2(spec.memory.phi, lam) *
           std::pow(2 * std::sin(lam / 2), -2 * spec.memory.d) / (2 * std::numbers::pi);
  };
  for (int k = 0; k <= L; ++k) {
    const double ref = oracle::acv_from_sdf(sdf, k);
    EXPECT_NEAR(acc[k], ref, 0.03 * std::abs(oracle::acv_from_sdf(sdf, 0))) << "lag " << k;
  }
}

TEST(Simulate, SeedsGiveUncorrelatedSeries) {
  const auto a = simulate_fid_exact(4096, 0.0, 0.0, 1.0, 1);
  const auto b = simulate_fid_exact(4096, 0.0, 0.0, 1.0, 2);
  double s = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) s += a[t] * b[t];
  EXPECT_LT(std::abs(s / 4096), 4.0 / std::sqrt(4096.0));
}

TEST(Simulate, StudentTInnovationsHaveHeavierTails) {
  SimSpec spec;
  spec.n = 20000;
  spec.innovation.family = InnovationFamily::student_t;
  spec.innovation.shape = {5.0};
  const auto x = simulate_arfima(spec);
  // unit-scale t(5): variance 5/3, kurtosis 9
  double m2 = 0.0, m4 = 0.0;
  const double m = oracle::mean(x);
  for (double v : x) {
    m2 += (v - m) * (v - m) / x.size();
    m4 += std::pow(v - m, 4) / x.size();
  }
  EXPECT_NEAR(m2, 5.0 / 3.0, 0.1);
  EXPECT_GT(m4 / (m2 * m2), 5.0);
}

TEST(Simulate, InvalidSpecs) {
  SimSpec spec;
  spec.memory.d = 0.5;
  EXPECT_THROW(simulate_arfima(spec), ArgumentError);
  spec.memory.d = 0.0;
  spec.memory.phi = {-1.2};
  EXPECT_THROW(simulate_arfima(spec), ArgumentError);
  spec.memory.phi.clear();
  spec.n = 0;
  EXPECT_THROW(simulate_arfima(spec), ArgumentError);
  spec.n = 10;
  spec.innovation.sigma = -1.0;
  EXPECT_THROW(simulate_arfima(spec), ArgumentError);
  EXPECT_THROW(simulate_fid_exact(10, 0.6, 0.0, 1.0, 1), DomainError);
  SimSpec b;
  b.memory.phi = {0.1, 0.1};
  EXPECT_EQ(b.resolved_burnin(), 500u);
}
