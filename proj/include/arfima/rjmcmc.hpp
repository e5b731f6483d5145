#pragma once
// Reversible-jump sampling over the short-memory orders (p, q).
//
// Moves are births and deaths on the PACF vectors: a birth appends
// u ~ U(-1, 1) to varphi or vartheta, a death drops the last entry. With a
// uniform prior on each PACF coordinate the prior density of the new
// coordinate and the density of u cancel, and the Jacobian is 1.

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "arfima/samplers.hpp"

namespace arfima {

/// Truncated joint Poisson prior p(p, q) ~ lambda^{p+q} / (p! q!) on
/// 0 <= p <= p_max, 0 <= q <= q_max.
struct ModelPrior {
  double lambda = 1.0;
  std::size_t p_max = 5;
  std::size_t q_max = 5;

  void validate() const;
};

/// Normalised log mass; -inf outside the grid.
double model_prior_logmass(ModelIndex m, const ModelPrior& prior);

/// Grid neighbours at L1 distance one, each with equal probability.
std::vector<std::pair<ModelIndex, double>> neighbors(ModelIndex m, std::size_t p_max,
                                                     std::size_t q_max);

struct RjMove {
  ModelIndex from;
  ModelIndex to;
  bool birth = false;
  double u = 0.0;
  double log_ratio = 0.0;
  bool accepted = false;
};

/// Attempt one birth/death move. mu, sigma, d and the untouched PACF vector
/// are carried over unchanged.
RjMove rj_step(ChainState& s, const ModelPrior& prior);

/// Block proposal covariance: a 3x3 block over (d, varphi_1, vartheta_1),
/// and independent equal variances for higher-order PACF coordinates.
struct ProposalCov {
  Eigen::Matrix3d Sigma11 = Eigen::Matrix3d::Identity() * 0.0025;
  double sigma2_varphi = 0.0025;
  double sigma2_vartheta = 0.0025;
};

/// Sigma^{(p,q)} over (d, varphi_1..p, vartheta_1..q). Throws ConfigError if
/// the result is not positive definite.
Eigen::MatrixXd build_proposal_cov(ModelIndex m, const ProposalCov& pc);

struct PilotConfig {
  ModelIndex model{1, 1};
  std::size_t iters = 5000;
  std::size_t burnin = 1000;
  double sigma = 0.05;  ///< proposal sd of the isotropic pilot random walk
};

/// Run a fixed-model pilot chain with proposals N^H(varpi, sigma^2 I) and
/// return its (d, varphi_1, vartheta_1) sample covariance scaled by
/// 2.38^2 / r. Coordinates absent from the pilot model, and degenerate
/// results, fall back to sigma^2 on the diagonal. If `final_state` is given
/// it receives the pilot chain's last memory draw.
ProposalCov pilot_tune(const std::vector<double>& x, const PilotConfig& pilot,
                       const ChainConfig& base, const PriorSpec& prior,
                       ReparamMemory* final_state = nullptr);

struct RjConfig {
  ChainConfig chain;  ///< model is the starting model
  ModelPrior model_prior;
  /// None: pilot-tune (or default when prior-only). A pilot-tuned run with no
  /// chain.init_memory starts from the pilot's final state.
  std::optional<ProposalCov> proposal;
  PilotConfig pilot;
  std::size_t sweeps_per_jump = 1;
};

struct RjResult {
  SampleMatrix samples;  ///< iter, p, q, d, mu, sigma, varphi_1..p_max, vartheta_1..q_max
  std::map<std::string, double> acceptance;
  ProposalCov proposal;
};

RjResult run_rj_chain(const std::vector<double>& x, const RjConfig& config,
                      const PriorSpec& prior, const TuningSpec& tuning);

}  // namespace arfima
