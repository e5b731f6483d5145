#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <map>

#include "arfima/errors.hpp"
#include "arfima/rjmcmc.hpp"
#include "arfima/simulate.hpp"
#include "oracles.hpp"

using namespace arfima;

namespace {

// lambda^{p+q}/(p! q!) normalised over the grid, from scratch.
std::map<std::pair<int, int>, double> poisson_grid(double lambda, int pm, int qm) {
  std::map<std::pair<int, int>, double> w;
  double z = 0.0;
  for (int p = 0; p <= pm; ++p) {
    for (int q = 0; q <= qm; ++q) {
      const double v = std::pow(lambda, p + q) / (std::tgamma(p + 1.0) * std::tgamma(q + 1.0));
      w[{p, q}] = v;
      z += v;
    }
  }
  for (auto& [_, v] : w) v /= z;
  return w;
}

ChainState make_state(const std::vector<double>& x, bool prior_only, std::uint64_t seed) {
  InnovationSpec in;
  in.sigma = 1.0;
  return ChainState::create(x, ReparamMemory{0.1, {}, {}}, 0.0, in, LikelihoodMode::approximate,
                            x.size(), prior_only, Rng(seed));
}

PriorSpec proper_prior() {
  PriorSpec p;
  p.mu.kind = MuPrior::Kind::gaussian;
  p.sigma.kind = SigmaPrior::Kind::root_inverse_gamma;
  return p;
}

}  // namespace

TEST(ModelPrior, MassesMatchPoissonGrid) {
  for (double lambda : {0.5, 1.0, 2.5}) {
    ModelPrior mp{lambda, 3, 2};
    const auto ref = poisson_grid(lambda, 3, 2);
    double total = 0.0;
    for (const auto& [pq, v] : ref) {
      const double m = std::exp(model_prior_logmass({std::size_t(pq.first), std::size_t(pq.second)}, mp));
      EXPECT_NEAR(m, v, 1e-12);
      total += m;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_NEAR(model_prior_logmass({2, 1}, mp) - model_prior_logmass({1, 1}, mp),
                std::log(lambda / 2.0), 1e-12);
  }
  EXPECT_EQ(model_prior_logmass({6, 0}, ModelPrior{}), -INFINITY);
  EXPECT_THROW((ModelPrior{0.0, 5, 5}.validate()), ConfigError);
}

TEST(Neighbors, GridStructure) {
  for (std::size_t p = 0; p <= 3; ++p) {
    for (std::size_t q = 0; q <= 2; ++q) {
      const auto nb = neighbors({p, q}, 3, 2);
      const std::size_t expect = (p > 0) + (p < 3) + (q > 0) + (q < 2);
      ASSERT_EQ(nb.size(), expect);
      double sum = 0.0;
      for (const auto& [m, pr] : nb) {
        const long dist = std::labs(long(m.p) - long(p)) + std::labs(long(m.q) - long(q));
        EXPECT_EQ(dist, 1);
        EXPECT_LE(m.p, 3u);
        EXPECT_LE(m.q, 2u);
        EXPECT_NEAR(pr, 1.0 / expect, 1e-15);
        sum += pr;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
  EXPECT_TRUE(neighbors({0, 0}, 0, 0).empty());
}

TEST(RjStep, BirthRatioFromOrigin) {
  const auto x = simulate_fid_exact(200, 0.2, 0.0, 1.0, 5);
  const ModelPrior mp{1.7, 3, 3};
  for (std::uint64_t seed = 1; seed < 40; ++seed) {
    auto s = make_state(x, false, seed);
    const double before = s.loglik;
    const double d = s.reparam.d, mu = s.psi.mu, sigma = s.psi.innovation.sigma;
    const auto mv = rj_step(s, mp);
    ASSERT_TRUE(mv.birth);
    if (!mv.accepted) continue;
    // from (0,0) each of two neighbours has prob 1/2; from (1,0) or (0,1), 1/3.
    EXPECT_NEAR(mv.log_ratio, s.loglik - before + std::log(1.7) + std::log((1.0 / 3) / 0.5),
                1e-9);
    EXPECT_EQ(s.reparam.d, d);
    EXPECT_EQ(s.psi.mu, mu);
    EXPECT_EQ(s.psi.innovation.sigma, sigma);
    const auto& v = s.reparam.p() == 1 ? s.reparam.varphi : s.reparam.vartheta;
    EXPECT_EQ(v.back(), mv.u);
    return;
  }
  FAIL() << "no accepted birth";
}

TEST(RjStep, DeathUndoesBirth) {
  auto s = make_state(std::vector<double>(50, 0.0), true, 3);
  const ModelPrior mp{1.0, 2, 2};
  ReparamMemory start = s.reparam;
  for (int i = 0; i < 2000; ++i) {
    const auto before = s.reparam;
    const auto mv = rj_step(s, mp);
    if (!mv.accepted) {
      EXPECT_EQ(s.reparam.flatten(), before.flatten());
      continue;
    }
    if (mv.birth) {
      auto back = s.reparam;
      auto& v = (mv.to.p != mv.from.p) ? back.varphi : back.vartheta;
      ASSERT_EQ(v.back(), mv.u);
      v.pop_back();
      EXPECT_EQ(back.flatten(), before.flatten());
    } else {
      auto fwd = s.reparam;
      auto& v = (mv.to.p != mv.from.p) ? fwd.varphi : fwd.vartheta;
      v.push_back(mv.u);
      EXPECT_EQ(fwd.flatten(), before.flatten());
    }
    EXPECT_EQ(s.reparam.d, start.d);
  }
}

TEST(RjStep, OutsideGridThrows) {
  auto s = make_state(std::vector<double>(50, 0.0), true, 3);
  s.set_memory(ReparamMemory{0.0, {0.1, 0.1, 0.1}, {}});
  EXPECT_THROW(rj_step(s, ModelPrior{1.0, 2, 2}), ArgumentError);
}

TEST(ProposalCov, BlockLayout) {
  ProposalCov pc;
  pc.Sigma11 << 0.01, 0.002, -0.001, 0.002, 0.02, 0.003, -0.001, 0.003, 0.03;
  pc.sigma2_varphi = 0.004;
  pc.sigma2_vartheta = 0.005;
  EXPECT_NEAR(build_proposal_cov({0, 0}, pc)(0, 0), 0.01, 0);
  EXPECT_TRUE(build_proposal_cov({1, 1}, pc).isApprox(Eigen::MatrixXd(pc.Sigma11)));
  const auto S = build_proposal_cov({2, 2}, pc);
  ASSERT_EQ(S.rows(), 5);
  // order: d, varphi_1, varphi_2, vartheta_1, vartheta_2
  EXPECT_EQ(S(0, 1), 0.002);
  EXPECT_EQ(S(0, 3), -0.001);
  EXPECT_EQ(S(1, 3), 0.003);
  EXPECT_EQ(S(2, 2), 0.004);
  EXPECT_EQ(S(4, 4), 0.005);
  EXPECT_EQ(S(2, 0), 0.0);
  EXPECT_EQ(S(4, 3), 0.0);
  const auto S01 = build_proposal_cov({0, 1}, pc);
  EXPECT_EQ(S01(1, 1), 0.03);
  EXPECT_EQ(S01(0, 1), -0.001);
  for (std::size_t p = 0; p <= 5; ++p)
    for (std::size_t q = 0; q <= 5; ++q) {
      Eigen::LLT<Eigen::MatrixXd> llt(build_proposal_cov({p, q}, pc));
      EXPECT_EQ(llt.info(), Eigen::Success);
    }
  pc.Sigma11(0, 1) = pc.Sigma11(1, 0) = 0.5;
  EXPECT_THROW(build_proposal_cov({1, 0}, pc), ConfigError);
}

TEST(Pilot, TunesPositiveDefiniteBlockAndReportsFinalState) {
  SimSpec spec;
  spec.n = 256;
  spec.memory.d = 0.2;
  spec.memory.phi = {-0.5};
  spec.seed = 11;
  const auto x = simulate_arfima(spec);
  ChainConfig base;
  PilotConfig pilot;
  pilot.iters = 3000;
  pilot.burnin = 500;
  ReparamMemory fin;
  const auto pc = pilot_tune(x, pilot, base, PriorSpec{}, &fin);
  Eigen::LLT<Eigen::Matrix3d> llt(pc.Sigma11);
  EXPECT_EQ(llt.info(), Eigen::Success);
  EXPECT_EQ(fin.p(), 1u);
  EXPECT_EQ(fin.q(), 1u);
  EXPECT_LT(std::abs(fin.d), 0.5);
  EXPECT_THROW(pilot_tune(std::vector<double>(50, 1.0), pilot, base, PriorSpec{}), DataError);
  pilot.model = {2, 0};
  EXPECT_THROW(pilot_tune(x, pilot, base, PriorSpec{}), ConfigError);
}

TEST(RunRj, PriorOnlyVisitsModelsByPriorMass) {
  RjConfig cfg;
  cfg.chain.prior_only = true;
  cfg.chain.iters = 60000;
  cfg.chain.burnin = 1000;
  cfg.chain.seed = 8;
  cfg.model_prior = {1.5, 2, 2};
  TuningSpec t;
  t.sigma_pacf = 0.3;
  const auto res = run_rj_chain(std::vector<double>(30, 0.0), cfg, proper_prior(), t);
  const auto p = res.samples.column("p"), q = res.samples.column("q");
  std::map<std::pair<int, int>, double> freq;
  for (std::size_t i = 0; i < p.size(); ++i) freq[{int(p[i]), int(q[i])}] += 1.0 / p.size();
  double tv = 0.0;
  for (const auto& [pq, v] : poisson_grid(1.5, 2, 2)) tv += 0.5 * std::abs(freq[pq] - v);
  EXPECT_LT(tv, 0.03);
  // unused PACF slots are NaN
  const auto phi2 = res.samples.column("varphi_2");
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(std::isnan(phi2[i]), p[i] < 2);
}

TEST(RunRj, DeterministicAndValidated) {
  const auto x = simulate_fid_exact(160, 0.1, 0.0, 1.0, 2);
  RjConfig cfg;
  cfg.chain.iters = 400;
  cfg.chain.burnin = 100;
  cfg.pilot.iters = 600;
  cfg.pilot.burnin = 100;
  cfg.model_prior = {1.0, 2, 2};
  const auto a = run_rj_chain(x, cfg, PriorSpec{}, TuningSpec{});
  const auto b = run_rj_chain(x, cfg, PriorSpec{}, TuningSpec{});
  // NaN padding defeats operator==; compare bit patterns.
  ASSERT_EQ(a.samples.data.size(), b.samples.data.size());
  EXPECT_EQ(std::memcmp(a.samples.data.data(), b.samples.data.data(),
                        a.samples.data.size() * sizeof(double)),
            0);
  EXPECT_EQ(a.samples.rows(), 300u);
  EXPECT_EQ(a.samples.columns.size(), 6u + 4u);
  auto bad = cfg;
  bad.chain.model = {3, 0};
  EXPECT_THROW(run_rj_chain(x, bad, PriorSpec{}, TuningSpec{}), ConfigError);
  bad = cfg;
  bad.chain.mode = LikelihoodMode::exact;
  EXPECT_THROW(run_rj_chain(x, bad, PriorSpec{}, TuningSpec{}), UnsupportedOperation);
  bad = cfg;
  bad.chain.prior_only = true;
  EXPECT_THROW(run_rj_chain(x, bad, PriorSpec{}, TuningSpec{}), ConfigError);
}
