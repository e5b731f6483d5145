#include <gtest/gtest.h>

#include <algorithm>

#include "arfima/diagnostics.hpp"
#include "arfima/errors.hpp"
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

std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed) {
  auto e = randn(n, seed);
  for (std::size_t t = 1; t < n; ++t) e[t] += phi * e[t - 1];
  return e;
}

SampleMatrix pq_samples(const std::vector<std::pair<int, int>>& v) {
  SampleMatrix s;
  s.columns = {"iter", "p", "q"};
  for (std::size_t i = 0; i < v.size(); ++i) {
    s.push_row({double(i), double(v[i].first), double(v[i].second)});
  }
  return s;
}

}  // namespace

TEST(Quantile, LinearInterpolation) {
  const std::vector<double> v{4, 1, 3, 2, 5};
  EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.5), 3.0);
  // position (n-1) p = 0.1 between 1 and 2
  EXPECT_DOUBLE_EQ(quantile(v, 0.025), 1.1);
  EXPECT_THROW(quantile(std::vector<double>{}, 0.5), ArgumentError);
}

TEST(Summarize, MomentsAndInterval) {
  const auto x = randn(5000, 1);
  const auto s = summarize(x);
  EXPECT_NEAR(s.mean, oracle::mean(x), 1e-12);
  EXPECT_NEAR(s.sd, oracle::sd(x), 1e-9);
  EXPECT_EQ(s.draws, 5000u);
  EXPECT_NEAR(s.ci_lo, -1.96, 0.1);
  EXPECT_NEAR(s.ci_hi, 1.96, 0.1);
  EXPECT_THROW(summarize(randn(99, 1)), ArgumentError);
}

TEST(Ess, IidAndAr1) {
  double e = 0.0;
  for (int r = 0; r < 10; ++r) e += effective_sample_size(randn(4000, 10 + r)) / 10;
  EXPECT_NEAR(e, 4000.0, 400.0);
  // AR(1): integrated autocorrelation time (1 + phi) / (1 - phi)
  double a = 0.0;
  for (int r = 0; r < 10; ++r) a += effective_sample_size(ar1(20000, 0.8, 50 + r)) / 10;
  EXPECT_NEAR(a, 20000.0 * 0.2 / 1.8, 0.2 * 20000.0 * 0.2 / 1.8);
}

TEST(Rhat, DetectsDisagreement) {
  std::vector<std::vector<double>> same{randn(1000, 1), randn(1000, 2), randn(1000, 3)};
  EXPECT_LT(split_rhat(same), 1.01);
  auto shifted = same;
  for (auto& v : shifted[0]) v += 2.0;
  EXPECT_GT(split_rhat(shifted), 1.1);
  // a trending single chain is caught by the split
  std::vector<double> trend(1000);
  for (int i = 0; i < 1000; ++i) trend[i] = i / 100.0;
  EXPECT_GT(split_rhat({trend}), 1.1);
  EXPECT_THROW(split_rhat({randn(10, 1), randn(11, 1)}), ArgumentError);
}

TEST(SummarizeSamples, NamedColumns) {
  SampleMatrix s;
  s.columns = {"iter", "d", "mu"};
  const auto d = randn(500, 4), mu = randn(500, 5);
  for (int i = 0; i < 500; ++i) s.push_row({double(i), d[i], mu[i]});
  const auto ps = summarize_samples(s, {"d"}, {{"d", 0.4}});
  EXPECT_EQ(ps.params.size(), 1u);
  EXPECT_NEAR(ps.params.at("d").mean, oracle::mean(d), 1e-12);
  EXPECT_EQ(ps.acceptance.at("d"), 0.4);
  EXPECT_THROW(summarize_samples(s, {"sigma"}), ArgumentError);
}

TEST(ModelTable, FrequenciesAndMarginals) {
  std::vector<std::pair<int, int>> v;
  for (int i = 0; i < 6; ++i) v.push_back({1, 0});
  for (int i = 0; i < 3; ++i) v.push_back({0, 1});
  v.push_back({2, 2});
  const auto t = model_table(pq_samples(v), 2, 2);
  EXPECT_DOUBLE_EQ(t.prob(1, 0), 0.6);
  EXPECT_DOUBLE_EQ(t.prob(0, 1), 0.3);
  EXPECT_DOUBLE_EQ(t.prob.sum(), 1.0);
  EXPECT_DOUBLE_EQ(t.p_marginal(1), 0.6);
  EXPECT_DOUBLE_EQ(t.q_marginal(0), 0.6);
  EXPECT_DOUBLE_EQ(t.q_marginal(2), 0.1);
  EXPECT_EQ(t.mode(), (std::pair<std::size_t, std::size_t>{1, 0}));

  std::mt19937_64 eng(3);
  std::shuffle(v.begin(), v.end(), eng);
  EXPECT_TRUE(model_table(pq_samples(v), 2, 2).prob.isApprox(t.prob));
  EXPECT_THROW(model_table(pq_samples(v), 1, 2), ArgumentError);
}

TEST(ModelTable, TotalVariationAgainstPrior) {
  // grid 1x1 with lambda = 1: prior masses 1/4, 1/4, 1/4, 1/4
  const auto t = model_table(pq_samples({{0, 0}, {0, 0}, {1, 0}, {1, 1}}), 1, 1);
  // |.5 - .25| + |.25 - .25| + 0 + |0 - .25| over 2
  EXPECT_NEAR(model_table_tv(t, 1.0), 0.25, 1e-12);
}

TEST(AggregateCells, MeansAndCoverage) {
  std::vector<ReplicateResult> reps;
  for (int i = 0; i < 4; ++i) {
    ReplicateResult r;
    r.n = 256;
    r.d_true = 0.2;
    r.d.mean = 0.2 + 0.01 * i;
    r.d.sd = 0.05;
    r.covered = i < 3;
    r.estimates["GPH"] = 0.3;
    reps.push_back(r);
  }
  ReplicateResult failed;
  failed.n = 256;
  failed.d_true = 0.2;
  failed.error = "boom";
  reps.push_back(failed);
  const auto cells = aggregate_cells(reps);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].count, 4u);
  EXPECT_NEAR(cells[0].mean_d, 0.215, 1e-12);
  EXPECT_NEAR(cells[0].mean_residual, 0.015, 1e-12);
  EXPECT_NEAR(cells[0].coverage, 0.75, 1e-12);
  EXPECT_NEAR(cells[0].estimator_bias.at("GPH"), 0.1, 1e-12);
}

TEST(StudyConfig, Validation) {
  StudyConfig c;
  c.replicates = 5;
  EXPECT_THROW(c.validate(), ConfigError);
  c.replicates = 10;
  c.d_grid = {0.5};
  EXPECT_THROW(c.validate(), ConfigError);
  c.d_grid = {0.0};
  c.chain.model = {1, 0};
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Study, SmallRunIsReproducible) {
  StudyConfig c;
  c.n_grid = {128};
  c.d_grid = {0.0, 0.3};
  c.replicates = 5;
  c.chain.iters = 600;
  c.chain.burnin = 100;
  c.estimators = true;
  const auto a = mc_study(c), b = mc_study(c);
  ASSERT_EQ(a.replicates.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(a.replicates[i].d.mean, b.replicates[i].d.mean);
    EXPECT_TRUE(a.replicates[i].error.empty());
  }
  EXPECT_EQ(a.cells.size(), 2u);
  EXPECT_EQ(a.log_sd_mu_vs_d.count(128), 1u);
}
