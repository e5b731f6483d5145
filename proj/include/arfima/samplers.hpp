#pragma once
// Fixed-model MCMC for ARFIMA(p,d,q): Metropolis and Gibbs kernels for the
// mean and scale, the truncated random-walk update for d, the joint
// hypercuboid-truncated update of the full memory vector, and the optional
// independence sampler for the pre-sample.

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arfima/core_model.hpp"
#include "arfima/likelihood.hpp"
#include "arfima/rng.hpp"

namespace arfima {

struct MuPrior {
  enum class Kind { gaussian, flat };
  Kind kind = Kind::flat;
  double mu0 = 0.0;
  double sigma0 = 1.0;

  double logpdf(double mu) const;
};

/// sigma ~ R(alpha0, beta0) means tau = sigma^{-2} ~ Gamma(alpha0, rate beta0).
/// The diffuse limit alpha0, beta0 -> 0 gives p(sigma) ~ 1/sigma.
struct SigmaPrior {
  enum class Kind { root_inverse_gamma, diffuse };
  Kind kind = Kind::diffuse;
  double alpha0 = 1.0;
  double beta0 = 1.0;

  double logpdf(double sigma) const;
  double shape() const { return kind == Kind::diffuse ? 0.0 : alpha0; }
  double rate() const { return kind == Kind::diffuse ? 0.0 : beta0; }
};

struct PriorSpec {
  MuPrior mu;
  SigmaPrior sigma;
  /// Log density of d on (-1/2, 1/2) up to a constant; empty means uniform.
  /// The PACF coordinates always carry a uniform prior.
  std::function<double(double)> d_logpdf;

  void validate() const;
  double log_d_prior(double d) const { return d_logpdf ? d_logpdf(d) : 0.0; }
};

struct TuningSpec {
  double sigma_mu = 0.0;  ///< <= 0: sample sd / sqrt(n)
  double sigma_sigma = 0.1;
  double sigma_d = 0.05;
  /// Proposal covariance over (d, varphi, vartheta). Empty: diagonal with
  /// sigma_d^2 for d and sigma_pacf^2 for the PACF coordinates.
  Eigen::MatrixXd Sigma_varpi;
  double sigma_pacf = 0.1;
  std::size_t xA_update_period = 0;  ///< 0: never

  void validate() const;
};

enum class KernelChoice { automatic, gibbs, mh };

struct ModelIndex {
  std::size_t p = 0;
  std::size_t q = 0;
  auto operator<=>(const ModelIndex&) const = default;
};

struct AcceptanceTally {
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> counts;  // attempts, accepts

  void record(const std::string& kernel, bool accepted);
  double rate(const std::string& kernel) const;
  std::map<std::string, double> rates() const;
};

/// Mutable sampler state for one chain. The cached likelihood pieces always
/// describe the current (psi, reparam, presample).
struct ChainState {
  ProcessParams psi;
  ReparamMemory reparam;
  LikelihoodMode mode = LikelihoodMode::approximate;
  bool prior_only = false;

  std::shared_ptr<LikelihoodContext> ctx;  // approximate mode
  FilteredSeries filt;
  std::vector<double> x;  // exact mode
  ExactPieces pieces;

  double loglik = 0.0;
  /// log of the hypercuboid mass of the current memory proposal, keyed by
  /// the proposal covariance it was computed under.
  std::optional<double> log_box_mass;

  Rng rng{0};
  AcceptanceTally tally;

  std::size_t n() const;
  ModelIndex model() const { return {reparam.p(), reparam.q()}; }

  /// Build a state with the given starting values; the pre-sample (P values)
  /// is filled with the sample mean.
  static ChainState create(std::vector<double> x, const ReparamMemory& start, double mu,
                           InnovationSpec innovation, LikelihoodMode mode, std::size_t P,
                           bool prior_only, Rng rng);

  /// Log-likelihood at (mu, sigma) for the cached memory (0 when prior-only).
  double loglik_at(double mu, double sigma) const;

  /// Install new memory parameters and refresh the cache.
  void set_memory(const ReparamMemory& r);

  /// Refresh loglik after changes to psi.
  void refresh();

  /// Throws NumericalError if any hard support constraint is violated.
  void check_invariants() const;
};

/// Log-likelihood at a candidate memory vector with everything else held.
struct MemoryCandidate {
  ReparamMemory reparam;
  MemoryParams memory;
  FilteredSeries filt;
  ExactPieces pieces;
  double loglik = 0.0;
};
MemoryCandidate evaluate_memory(const ChainState& s, const ReparamMemory& r);
void accept_memory(ChainState& s, MemoryCandidate&& cand);

// Acceptance log-ratios, exposed for testing.
double log_ratio_mu(const ChainState& s, const PriorSpec& prior, double xi_mu);
double log_ratio_sigma(const ChainState& s, const PriorSpec& prior, double xi_sigma);
/// For d; includes the truncation correction for the (-1/2, 1/2) proposal.
double log_ratio_d(const ChainState& s, const PriorSpec& prior, double sigma_d, double xi_d,
                   double xi_loglik);

bool mh_update_mu(ChainState& s, const TuningSpec& tuning, const PriorSpec& prior);
bool mh_update_sigma(ChainState& s, const TuningSpec& tuning, const PriorSpec& prior);
void gibbs_update_mu(ChainState& s, const PriorSpec& prior);
void gibbs_update_sigma(ChainState& s, const PriorSpec& prior);
bool mh_update_d(ChainState& s, const TuningSpec& tuning, const PriorSpec& prior);

/// Box (-1/2, 1/2) x (-1, 1)^{p+q} for the flattened memory vector.
std::pair<Eigen::VectorXd, Eigen::VectorXd> memory_box(std::size_t p, std::size_t q);

/// Joint random-walk update of (d, varphi, vartheta) from the
/// hypercuboid-truncated normal N(varpi, Sigma).
bool joint_update_memory(ChainState& s, const Eigen::MatrixXd& Sigma, const PriorSpec& prior);

struct XaProposal {
  std::vector<double> presample;  ///< presample[i] = proposed x_{-i}
  double log_q = 0.0;             ///< proposal log density
};
/// Backward-projection proposal for the pre-sample (requires P <= n).
XaProposal propose_xA(const ChainState& s, Rng& rng);
/// Proposal log density of a given pre-sample under the current parameters.
double xA_log_density(const ChainState& s, const std::vector<double>& presample);
bool update_xA(ChainState& s);

/// Row-major draws with named columns.
struct SampleMatrix {
  std::vector<std::string> columns;
  std::vector<double> data;

  std::size_t rows() const { return columns.empty() ? 0 : data.size() / columns.size(); }
  std::size_t col_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
  double at(std::size_t row, std::size_t col) const { return data[row * columns.size() + col]; }
  void push_row(const std::vector<double>& row);
};

struct ChainConfig {
  ModelIndex model;
  LikelihoodMode mode = LikelihoodMode::approximate;
  std::size_t truncation = 0;  ///< 0: P = n
  InnovationSpec innovation;   ///< family and shape; sigma is the start value if > 0
  KernelChoice mu_kernel = KernelChoice::automatic;
  KernelChoice sigma_kernel = KernelChoice::automatic;
  std::size_t iters = 2000;  ///< total, including burn-in
  std::size_t burnin = 1000;
  std::size_t thin = 1;
  std::uint64_t seed = 1;
  std::uint64_t chain_index = 0;
  bool prior_only = false;
  double init_d = 0.0;
  std::optional<ReparamMemory> init_memory;

  void validate() const;
};

struct ChainResult {
  SampleMatrix samples;  ///< iter, d, mu, sigma, varphi_k, vartheta_k
  std::map<std::string, double> acceptance;
};

ChainResult run_chain(const std::vector<double>& x, const ChainConfig& config,
                      const PriorSpec& prior, const TuningSpec& tuning);

/// Default proposal covariance for a model when none is configured.
Eigen::MatrixXd default_memory_cov(std::size_t p, std::size_t q, const TuningSpec& tuning);

/// Resolve the Gibbs/MH choice for the given innovation family.
bool use_gibbs(KernelChoice choice, InnovationFamily family);

/// Initial state shared by the fixed-model and reversible-jump drivers.
ChainState initial_state(const std::vector<double>& x, const ChainConfig& config);

/// One within-model sweep: mu, sigma, memory, and (periodically) x_A.
void within_model_sweep(ChainState& s, const ChainConfig& config, const PriorSpec& prior,
                        const TuningSpec& tuning, const Eigen::MatrixXd& Sigma,
                        std::size_t iter);

}  // namespace arfima
