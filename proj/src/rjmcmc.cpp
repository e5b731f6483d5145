#include "arfima/rjmcmc.hpp"

#include <cmath>
#include <limits>

#include "arfima/errors.hpp"

namespace arfima {

void ModelPrior::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("model prior: lambda must be positive");
  }
}

namespace {

double log_unnormalised(std::size_t p, std::size_t q, double lambda) {
  return static_cast<double>(p + q) * std::log(lambda) - std::lgamma(p + 1.0) -
         std::lgamma(q + 1.0);
}

}  // namespace

double model_prior_logmass(ModelIndex m, const ModelPrior& prior) {
  prior.validate();
  if (m.p > prior.p_max || m.q > prior.q_max) return -std::numeric_limits<double>::infinity();
  // Log-sum-exp over the grid.
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p <= prior.p_max; ++p) {
    for (std::size_t q = 0; q <= prior.q_max; ++q) {
      top = std::max(top, log_unnormalised(p, q, prior.lambda));
    }
  }
  double acc = 0.0;
  for (std::size_t p = 0; p <= prior.p_max; ++p) {
    for (std::size_t q = 0; q <= prior.q_max; ++q) {
      acc += std::exp(log_unnormalised(p, q, prior.lambda) - top);
    }
  }
  return log_unnormalised(m.p, m.q, prior.lambda) - top - std::log(acc);
}

std::vector<std::pair<ModelIndex, double>> neighbors(ModelIndex m, std::size_t p_max,
                                                     std::size_t q_max) {
  std::vector<ModelIndex> nb;
  if (m.p > 0) nb.push_back({m.p - 1, m.q});
  if (m.p < p_max) nb.push_back({m.p + 1, m.q});
  if (m.q > 0) nb.push_back({m.p, m.q - 1});
  if (m.q < q_max) nb.push_back({m.p, m.q + 1});
  std::vector<std::pair<ModelIndex, double>> out;
  for (const auto& k : nb) out.emplace_back(k, 1.0 / static_cast<double>(nb.size()));
  return out;
}

RjMove rj_step(ChainState& s, const ModelPrior& prior) {
  RjMove mv;
  mv.from = s.model();
  if (mv.from.p > prior.p_max || mv.from.q > prior.q_max) {
    throw ArgumentError("rj_step: current model is outside the prior grid");
  }
  const auto nb = neighbors(mv.from, prior.p_max, prior.q_max);
  if (nb.empty()) return mv;
  const auto& [to, prob_fwd] = nb[s.rng.index(nb.size())];
  mv.to = to;
  mv.birth = to.p + to.q > mv.from.p + mv.from.q;

  ReparamMemory r = s.reparam;
  auto& vec = (to.p != mv.from.p) ? r.varphi : r.vartheta;
  if (mv.birth) {
    mv.u = s.rng.uniform(-1.0, 1.0);
    vec.push_back(mv.u);
  } else {
    mv.u = vec.back();
    vec.pop_back();
  }
  const double prob_rev = 1.0 / static_cast<double>(neighbors(to, prior.p_max, prior.q_max).size());

  auto cand = evaluate_memory(s, r);
  mv.log_ratio = cand.loglik - s.loglik + model_prior_logmass(to, prior) -
                 model_prior_logmass(mv.from, prior) + std::log(prob_rev) - std::log(prob_fwd);
  mv.accepted = mv.log_ratio >= 0.0 || std::log(s.rng.uniform()) < mv.log_ratio;
  if (mv.accepted) {
    accept_memory(s, std::move(cand));
    s.log_box_mass.reset();
  }
  s.tally.record(mv.birth ? "rj_birth" : "rj_death", mv.accepted);
  return mv;
}

Eigen::MatrixXd build_proposal_cov(ModelIndex m, const ProposalCov& pc) {
  const auto p = static_cast<Eigen::Index>(m.p), q = static_cast<Eigen::Index>(m.q);
  const Eigen::Index r = 1 + p + q;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(r, r);
  S(0, 0) = pc.Sigma11(0, 0);
  const Eigen::Index a = 1, b = 1 + p;  // positions of varphi_1 and vartheta_1
  if (p > 0) {
    S(0, a) = S(a, 0) = pc.Sigma11(0, 1);
    S(a, a) = pc.Sigma11(1, 1);
    for (Eigen::Index k = 1; k < p; ++k) S(a + k, a + k) = pc.sigma2_varphi;
  }
  if (q > 0) {
    S(0, b) = S(b, 0) = pc.Sigma11(0, 2);
    S(b, b) = pc.Sigma11(2, 2);
    if (p > 0) S(a, b) = S(b, a) = pc.Sigma11(1, 2);
    for (Eigen::Index k = 1; k < q; ++k) S(b + k, b + k) = pc.sigma2_vartheta;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) {
    throw ConfigError("proposal covariance for (" + std::to_string(m.p) + "," +
                      std::to_string(m.q) + ") is not positive definite");
  }
  return S;
}

ProposalCov pilot_tune(const std::vector<double>& x, const PilotConfig& pilot,
                       const ChainConfig& base, const PriorSpec& prior, ReparamMemory* final_state) {
  if (x.size() < 128) throw DataError("pilot tuning needs at least 128 observations");
  if (!(pilot.sigma > 0.0)) throw ConfigError("pilot sigma must be positive");
  if (pilot.model.p > 1 || pilot.model.q > 1) {
    throw ConfigError("pilot model must have p, q <= 1");
  }
  ChainConfig cfg = base;
  cfg.model = pilot.model;
  cfg.init_memory.reset();
  cfg.iters = pilot.iters;
  cfg.burnin = pilot.burnin;
  cfg.thin = 1;
  cfg.prior_only = false;
  cfg.chain_index = base.chain_index + 1'000'003;  // distinct stream from the main run

  const std::size_t r = pilot.model.p + pilot.model.q + 1;
  TuningSpec tuning;
  tuning.sigma_d = pilot.sigma;
  tuning.Sigma_varpi =
      Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)) *
      (pilot.sigma * pilot.sigma);
  const auto res = run_chain(x, cfg, prior, tuning);
  if (final_state && res.samples.rows() > 0) {
    const std::size_t last = res.samples.rows() - 1;
    final_state->d = res.samples.at(last, res.samples.col_index("d"));
    final_state->varphi.clear();
    final_state->vartheta.clear();
    if (pilot.model.p == 1) {
      final_state->varphi.push_back(res.samples.at(last, res.samples.col_index("varphi_1")));
    }
    if (pilot.model.q == 1) {
      final_state->vartheta.push_back(res.samples.at(last, res.samples.col_index("vartheta_1")));
    }
  }

  // Columns in pilot-model order, then scattered into the 3x3 block.
  std::vector<std::vector<double>> cols{res.samples.column("d")};
  std::vector<int> slot{0};
  if (pilot.model.p == 1) {
    cols.push_back(res.samples.column("varphi_1"));
    slot.push_back(1);
  }
  if (pilot.model.q == 1) {
    cols.push_back(res.samples.column("vartheta_1"));
    slot.push_back(2);
  }
  const std::size_t m = res.samples.rows();
  const double fallback = pilot.sigma * pilot.sigma;
  ProposalCov pc;
  pc.Sigma11 = Eigen::Matrix3d::Identity() * fallback;
  pc.sigma2_varphi = pc.sigma2_vartheta = fallback;
  if (m < 2) return pc;

  Eigen::MatrixXd cov(cols.size(), cols.size());
  std::vector<double> mean(cols.size(), 0.0);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    for (double v : cols[i]) mean[i] += v;
    mean[i] /= static_cast<double>(m);
  }
  for (std::size_t i = 0; i < cols.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < m; ++t) acc += (cols[i][t] - mean[i]) * (cols[j][t] - mean[j]);
      cov(i, j) = acc / static_cast<double>(m - 1);
    }
  }
  cov *= 2.38 * 2.38 / static_cast<double>(r);
  cov.diagonal().array() += 1e-10;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success || cov.diagonal().minCoeff() < 1e-9) return pc;

  for (std::size_t i = 0; i < cols.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) pc.Sigma11(slot[i], slot[j]) = cov(i, j);
  }
  // Higher-order PACF coordinates are weakly identified; they keep the pilot's
  // isotropic step rather than inheriting the (often much tighter) lag-1 scale.
  return pc;
}

RjResult run_rj_chain(const std::vector<double>& x, const RjConfig& config,
                      const PriorSpec& prior, const TuningSpec& tuning_in) {
  const auto& cc = config.chain;
  cc.validate();
  prior.validate();
  tuning_in.validate();
  config.model_prior.validate();
  const auto& mp = config.model_prior;
  if (cc.model.p > mp.p_max || cc.model.q > mp.q_max) {
    throw ConfigError("starting model lies outside the (p_max, q_max) grid");
  }
  if (cc.mode != LikelihoodMode::approximate) {
    throw UnsupportedOperation("reversible jump uses the approximate likelihood");
  }
  if (config.sweeps_per_jump == 0) throw ConfigError("sweeps_per_jump must be >= 1");
  if (cc.prior_only && (prior.mu.kind == MuPrior::Kind::flat ||
                        prior.sigma.kind == SigmaPrior::Kind::diffuse)) {
    throw ConfigError("prior-only runs need proper mu and sigma priors");
  }

  RjResult out;
  ReparamMemory warm;
  if (config.proposal) {
    out.proposal = *config.proposal;
  } else if (cc.prior_only) {
    const double v_d = tuning_in.sigma_d * tuning_in.sigma_d;
    const double v_p = tuning_in.sigma_pacf * tuning_in.sigma_pacf;
    out.proposal.Sigma11 = Eigen::Vector3d(v_d, v_p, v_p).asDiagonal();
    out.proposal.sigma2_varphi = out.proposal.sigma2_vartheta = v_p;
  } else {
    out.proposal = pilot_tune(x, config.pilot, cc, prior, &warm);
  }
  std::vector<std::vector<Eigen::MatrixXd>> sigmas(mp.p_max + 1);
  for (std::size_t p = 0; p <= mp.p_max; ++p) {
    for (std::size_t q = 0; q <= mp.q_max; ++q) {
      sigmas[p].push_back(build_proposal_cov({p, q}, out.proposal));
    }
  }

  // Without an explicit start, begin where the pilot chain ended: its model
  // nests the common low orders and its state has already burnt in.
  ChainConfig start_cfg = cc;
  if (!config.proposal && !cc.prior_only && !cc.init_memory && config.pilot.model.p <= mp.p_max &&
      config.pilot.model.q <= mp.q_max) {
    start_cfg.init_memory = warm;
    start_cfg.model = config.pilot.model;
  }
  ChainState s = initial_state(x, start_cfg);
  TuningSpec tuning = tuning_in;
  if (!(tuning.sigma_mu > 0.0)) {
    double m = 0.0, ss = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    for (double v : x) ss += (v - m) * (v - m);
    const double sd = x.size() > 1 ? std::sqrt(ss / static_cast<double>(x.size() - 1)) : 0.0;
    tuning.sigma_mu = sd > 0.0 ? sd / std::sqrt(static_cast<double>(x.size())) : 0.1;
  }
  tuning.sigma_d = std::sqrt(out.proposal.Sigma11(0, 0));

  auto& cols = out.samples.columns;
  cols = {"iter", "p", "q", "d", "mu", "sigma"};
  for (std::size_t k = 1; k <= mp.p_max; ++k) cols.push_back("varphi_" + std::to_string(k));
  for (std::size_t k = 1; k <= mp.q_max; ++k) cols.push_back("vartheta_" + std::to_string(k));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> row(cols.size());

  for (std::size_t it = 0; it < cc.iters; ++it) {
    for (std::size_t k = 0; k < config.sweeps_per_jump; ++k) {
      const auto m = s.model();
      within_model_sweep(s, cc, prior, tuning, sigmas[m.p][m.q], it);
    }
    rj_step(s, mp);
    s.check_invariants();
    if (it >= cc.burnin && (it - cc.burnin) % cc.thin == 0) {
      std::fill(row.begin(), row.end(), nan);
      row[0] = static_cast<double>(it);
      row[1] = static_cast<double>(s.reparam.p());
      row[2] = static_cast<double>(s.reparam.q());
      row[3] = s.reparam.d;
      row[4] = s.psi.mu;
      row[5] = s.psi.innovation.sigma;
      std::copy(s.reparam.varphi.begin(), s.reparam.varphi.end(), row.begin() + 6);
      std::copy(s.reparam.vartheta.begin(), s.reparam.vartheta.end(),
                row.begin() + 6 + static_cast<long>(mp.p_max));
      out.samples.push_row(row);
    }
  }
  out.acceptance = s.tally.rates();
  return out;
}

}  // namespace arfima
