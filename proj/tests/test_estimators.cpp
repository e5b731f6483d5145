#include <gtest/gtest.h>

#include <complex>

#include "arfima/errors.hpp"
#include "arfima/estimators.hpp"
#include "arfima/simulate.hpp"
#include "oracles.hpp"

using namespace arfima;

namespace {

std::vector<double> randn(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> N;
  std::vector<double> v(n);
  for (auto& e : v) e = N(eng);
  return v;
}

using Fn = EstimatorResult (*)(std::span<const double>);
EstimatorResult rs(std::span<const double> x) { return estimate_rs(x); }
EstimatorResult gph(std::span<const double> x) { return estimate_gph(x); }
EstimatorResult dfa(std::span<const double> x) { return estimate_dfa(x); }
const std::vector<std::pair<const char*, Fn>> kAll{{"RS", rs}, {"GPH", gph}, {"DFA", dfa}};

}  // namespace

TEST(FitLine, ExactAndNoisy) {
  std::vector<double> x{0, 1, 2, 3, 4}, y;
  for (double v : x) y.push_back(2.0 + 3.0 * v);
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.intercept, 2.0, 1e-12);
  EXPECT_NEAR(f.slope, 3.0, 1e-12);
  EXPECT_NEAR(f.slope_se, 0.0, 1e-7);
  // y = (0, 1, 1, 3): slope 0.9, intercept -0.1, residual SS 0.7 on 2 df, Sxx 5
  const auto g = fit_line(std::vector<double>{0, 1, 2, 3}, std::vector<double>{0, 1, 1, 3});
  EXPECT_NEAR(g.slope, 0.9, 1e-12);
  EXPECT_NEAR(g.intercept, -0.1, 1e-12);
  EXPECT_NEAR(g.slope_se, std::sqrt(0.7 / 2 / 5), 1e-12);
  EXPECT_THROW(fit_line(std::vector<double>{1, 1}, std::vector<double>{0, 1}), ArgumentError);
}

TEST(Periodogram, MatchesDirectDft) {
  const auto x = randn(50, 3);
  const double m = oracle::mean(x);
  const auto I = periodogram(x, 10);
  ASSERT_EQ(I.size(), 10u);
  for (std::size_t j = 1; j <= 10; ++j) {
    std::complex<double> s = 0.0;
    for (std::size_t t = 0; t < 50; ++t) {
      s += (x[t] - m) * std::polar(1.0, -2 * std::numbers::pi * j * (t + 1.0) / 50.0);
    }
    EXPECT_NEAR(I[j - 1], std::norm(s) / (2 * std::numbers::pi * 50), 1e-12);
  }
}

TEST(Estimators, AffineInvariance) {
  const auto x = simulate_fid_exact(1024, 0.3, 0.0, 1.0, 7);
  for (double b : {3.7, -2.0}) {
    std::vector<double> y;
    for (double v : x) y.push_back(10.0 + b * v);
    for (const auto& [name, f] : kAll) {
      EXPECT_NEAR(f(x).d_hat, f(y).d_hat, 1e-8) << name << " b=" << b;
    }
  }
}

TEST(Estimators, WhiteNoiseBands) {
  for (const auto& [name, f] : kAll) {
    std::vector<double> est;
    for (int r = 0; r < 8; ++r) est.push_back(f(randn(4096, 100 + r)).d_hat);
    const double tol = std::string(name) == "GPH" ? 0.15 : 0.1;
    EXPECT_NEAR(oracle::mean(est), 0.0, tol) << name;
  }
}

TEST(Estimators, TrackPositiveMemory) {
  for (const auto& [name, f] : kAll) {
    std::vector<double> est;
    for (int r = 0; r < 8; ++r) est.push_back(f(simulate_fid_exact(2048, 0.35, 0.0, 1.0, 200 + r)).d_hat);
    EXPECT_GT(oracle::mean(est), 0.2) << name;
  }
}

TEST(Estimators, RejectBadInput) {
  const std::vector<double> flat(512, 1.0);
  for (const auto& [name, f] : kAll) {
    EXPECT_THROW(f(flat), DataError) << name;
    EXPECT_THROW(f(std::vector<double>(20, 0.0)), ArgumentError) << name;
  }
  auto x = randn(512, 1);
  x[100] = NAN;
  EXPECT_THROW(estimate_gph(x), DataError);
  EXPECT_THROW(estimate_gph(randn(512, 1), 3), ArgumentError);
  EXPECT_THROW(estimate_rs(randn(512, 1), 2), ArgumentError);
}

TEST(Estimators, DefaultsReported) {
  const auto r = estimate_gph(randn(1024, 4));
  EXPECT_EQ(r.method, EstimatorMethod::GPH);
  EXPECT_TRUE(r.stderr_.has_value());
  EXPECT_EQ(to_string(EstimatorMethod::DFA), "DFA");
}

TEST(Dfa, QuadraticDetrendingRemovesLinearTrend) {
  auto x = simulate_fid_exact(2048, 0.2, 0.0, 1.0, 9);
  DfaOptions opt;
  opt.order = 2;
  const double base = estimate_dfa(x, opt).d_hat;
  for (std::size_t t = 0; t < x.size(); ++t) x[t] += 0.01 * static_cast<double>(t);
  EXPECT_NEAR(estimate_dfa(x, opt).d_hat, base, 1e-6);
  // first-order DFA sees the trend as extra persistence
  opt.order = 1;
  EXPECT_GT(estimate_dfa(x, opt).d_hat, base + 0.1);
}
