#include "arfima/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "arfima/errors.hpp"
#include "arfima/kernels.hpp"
#include "arfima/truncated_normal.hpp"

namespace arfima {

double MuPrior::logpdf(double mu) const {
  if (kind == Kind::flat) return 0.0;
  const double z = (mu - mu0) / sigma0;
  return -0.5 * z * z;
}

double SigmaPrior::logpdf(double sigma) const {
  if (!(sigma > 0.0)) return -std::numeric_limits<double>::infinity();
  if (kind == Kind::diffuse) return -std::log(sigma);
  return -(2.0 * alpha0 + 1.0) * std::log(sigma) - beta0 / (sigma * sigma);
}

void PriorSpec::validate() const {
  if (mu.kind == MuPrior::Kind::gaussian && !(mu.sigma0 > 0.0)) {
    throw ConfigError("mu prior: sigma0 must be positive");
  }
  if (sigma.kind == SigmaPrior::Kind::root_inverse_gamma &&
      !(sigma.alpha0 > 0.0 && sigma.beta0 > 0.0)) {
    throw ConfigError("sigma prior: alpha0 and beta0 must be positive");
  }
}

void TuningSpec::validate() const {
  if (!(sigma_sigma > 0.0)) throw ConfigError("tuning: sigma_sigma must be positive");
  if (!(sigma_d > 0.0)) throw ConfigError("tuning: sigma_d must be positive");
  if (!(sigma_pacf > 0.0)) throw ConfigError("tuning: sigma_pacf must be positive");
  if (Sigma_varpi.size() > 0) {
    if (Sigma_varpi.rows() != Sigma_varpi.cols()) {
      throw ConfigError("tuning: Sigma_varpi must be square");
    }
    if (!Sigma_varpi.isApprox(Sigma_varpi.transpose())) {
      throw ConfigError("tuning: Sigma_varpi must be symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(Sigma_varpi);
    if (llt.info() != Eigen::Success) {
      throw ConfigError("tuning: Sigma_varpi must be positive definite");
    }
  }
}

void AcceptanceTally::record(const std::string& kernel, bool accepted) {
  auto& c = counts[kernel];
  ++c.first;
  if (accepted) ++c.second;
}

double AcceptanceTally::rate(const std::string& kernel) const {
  const auto it = counts.find(kernel);
  if (it == counts.end() || it->second.first == 0) return 0.0;
  return static_cast<double>(it->second.second) / static_cast<double>(it->second.first);
}

std::map<std::string, double> AcceptanceTally::rates() const {
  std::map<std::string, double> out;
  for (const auto& [k, _] : counts) out[k] = rate(k);
  return out;
}

std::size_t ChainState::n() const { return ctx ? ctx->n() : x.size(); }

ChainState ChainState::create(std::vector<double> x, const ReparamMemory& start, double mu,
                              InnovationSpec innovation, LikelihoodMode mode, std::size_t P,
                              bool prior_only, Rng rng) {
  innovation.validate();
  ChainState s;
  s.mode = mode;
  s.prior_only = prior_only;
  s.rng = std::move(rng);
  s.psi.mu = mu;
  s.psi.innovation = std::move(innovation);
  if (mode == LikelihoodMode::approximate) {
    s.ctx = std::make_shared<LikelihoodContext>(
        AugmentedSeries::with_mean_presample(std::move(x), P));
  } else {
    if (start.p() != 0 || start.q() != 0) {
      throw UnsupportedOperation("exact likelihood is only available for FI(d) models");
    }
    if (s.psi.innovation.family != InnovationFamily::gaussian) {
      throw UnsupportedOperation("exact likelihood requires Gaussian innovations");
    }
    AugmentedSeries{x, {}}.validate();
    s.x = std::move(x);
  }
  s.set_memory(start);
  return s;
}

double ChainState::loglik_at(double mu, double sigma) const {
  if (prior_only) return 0.0;
  if (mode == LikelihoodMode::exact) return pieces.loglik(mu, sigma);
  InnovationSpec in = psi.innovation;
  in.sigma = sigma;
  return ctx->loglik(filt, mu, in);
}

MemoryCandidate evaluate_memory(const ChainState& s, const ReparamMemory& r) {
  MemoryCandidate c;
  c.reparam = r;
  c.memory = to_memory(r);
  if (s.prior_only) return c;
  if (s.mode == LikelihoodMode::approximate) {
    c.filt = s.ctx->filter(c.memory);
    c.loglik = s.ctx->loglik(c.filt, s.psi.mu, s.psi.innovation);
  } else {
    c.pieces = exact_pieces(s.x, r.d);
    c.loglik = c.pieces.loglik(s.psi.mu, s.psi.innovation.sigma);
  }
  return c;
}

void accept_memory(ChainState& s, MemoryCandidate&& cand) {
  s.reparam = std::move(cand.reparam);
  s.psi.memory = std::move(cand.memory);
  s.filt = std::move(cand.filt);
  s.pieces = std::move(cand.pieces);
  s.loglik = cand.loglik;
}

void ChainState::set_memory(const ReparamMemory& r) {
  accept_memory(*this, evaluate_memory(*this, r));
  log_box_mass.reset();
}

void ChainState::refresh() { loglik = loglik_at(psi.mu, psi.innovation.sigma); }

void ChainState::check_invariants() const {
  if (!(std::abs(reparam.d) < 0.5)) throw NumericalError("sampler left the support of d");
  for (double v : reparam.varphi) {
    if (!(std::abs(v) < 1.0)) throw NumericalError("sampler left the AR PACF support");
  }
  for (double v : reparam.vartheta) {
    if (!(std::abs(v) < 1.0)) throw NumericalError("sampler left the MA PACF support");
  }
  if (!(psi.innovation.sigma > 0.0) || !std::isfinite(psi.innovation.sigma)) {
    throw NumericalError("sampler produced a non-positive sigma");
  }
  if (!std::isfinite(psi.mu)) throw NumericalError("sampler produced a non-finite mu");
  if (!std::isfinite(loglik)) throw NumericalError("log-likelihood is not finite");
}

namespace {

bool accept(Rng& rng, double log_a) {
  if (log_a >= 0.0) return true;
  return std::log(rng.uniform()) < log_a;
}

double d_trunc_log_mass(double d, double sigma_d) {
  return log_trunc_normal_mass(d, sigma_d, -0.5, 0.5);
}

void require_gaussian(const ChainState& s, const char* what) {
  if (s.psi.innovation.family != InnovationFamily::gaussian) {
    throw UnsupportedOperation(std::string(what) + " requires Gaussian innovations");
  }
}

}  // namespace

double log_ratio_mu(const ChainState& s, const PriorSpec& prior, double xi_mu) {
  return s.loglik_at(xi_mu, s.psi.innovation.sigma) - s.loglik + prior.mu.logpdf(xi_mu) -
         prior.mu.logpdf(s.psi.mu);
}

double log_ratio_sigma(const ChainState& s, const PriorSpec& prior, double xi_sigma) {
  const double sigma = s.psi.innovation.sigma;
  // log(xi/sigma) is the log-normal proposal asymmetry.
  return s.loglik_at(s.psi.mu, xi_sigma) - s.loglik + prior.sigma.logpdf(xi_sigma) -
         prior.sigma.logpdf(sigma) + std::log(xi_sigma / sigma);
}

double log_ratio_d(const ChainState& s, const PriorSpec& prior, double sigma_d, double xi_d,
                   double xi_loglik) {
  const double d = s.reparam.d;
  return xi_loglik - s.loglik + prior.log_d_prior(xi_d) - prior.log_d_prior(d) +
         d_trunc_log_mass(d, sigma_d) - d_trunc_log_mass(xi_d, sigma_d);
}

bool mh_update_mu(ChainState& s, const TuningSpec& tuning, const PriorSpec& prior) {
  const double xi = s.psi.mu + tuning.sigma_mu * s.rng.normal();
  const bool ok = accept(s.rng, log_ratio_mu(s, prior, xi));
  if (ok) {
    s.psi.mu = xi;
    s.refresh();
  }
  s.tally.record("mu", ok);
  return ok;
}

bool mh_update_sigma(ChainState& s, const TuningSpec& tuning, const PriorSpec& prior) {
  const double xi = s.psi.innovation.sigma * std::exp(tuning.sigma_sigma * s.rng.normal());
  const bool ok = accept(s.rng, log_ratio_sigma(s, prior, xi));
  if (ok) {
    s.psi.innovation.sigma = xi;
    s.refresh();
  }
  s.tally.record("sigma", ok);
  return ok;
}

void gibbs_update_mu(ChainState& s, const PriorSpec& prior) {
  require_gaussian(s, "Gibbs update of mu");
  const double sigma2 = s.psi.innovation.sigma * s.psi.innovation.sigma;
  double prec = 0.0, lin = 0.0;
  if (prior.mu.kind == MuPrior::Kind::gaussian) {
    const double v0 = prior.mu.sigma0 * prior.mu.sigma0;
    prec += 1.0 / v0;
    lin += prior.mu.mu0 / v0;
  }
  if (!s.prior_only) {
    if (s.mode == LikelihoodMode::approximate) {
      const double n = static_cast<double>(s.filt.c.size());
      const double Pi = s.filt.pi_sum;
      const double csum = std::accumulate(s.filt.c.begin(), s.filt.c.end(), 0.0);
      prec += n * Pi * Pi / sigma2;
      lin += Pi * csum / sigma2;
    } else {
      const auto& p = s.pieces;
      prec += p.q11 / sigma2;
      lin += (p.qy1 + p.center * p.q11) / sigma2;
    }
  }
  if (!(prec > 0.0)) throw ConfigError("Gibbs update of mu: posterior is improper");
  const double var = 1.0 / prec;
  s.psi.mu = s.rng.normal(var * lin, std::sqrt(var));
  s.refresh();
}

void gibbs_update_sigma(ChainState& s, const PriorSpec& prior) {
  require_gaussian(s, "Gibbs update of sigma");
  double shape = prior.sigma.shape();
  double rate = prior.sigma.rate();
  if (!s.prior_only) {
    double S = 0.0;
    if (s.mode == LikelihoodMode::approximate) {
      S = kernels::omp::sum_sq_dev(s.filt.c, s.filt.pi_sum * s.psi.mu);
    } else {
      S = s.pieces.Q(s.psi.mu);
    }
    shape += 0.5 * static_cast<double>(s.n());
    rate += 0.5 * S;
  }
  if (!(shape > 0.0 && rate > 0.0)) {
    throw ConfigError("Gibbs update of sigma: posterior is improper");
  }
  const double tau = s.rng.gamma(shape, rate);
  s.psi.innovation.sigma = 1.0 / std::sqrt(tau);
  s.refresh();
}

bool mh_update_d(ChainState& s, const TuningSpec& tuning, const PriorSpec& prior) {
  const double xi = sample_trunc_normal(s.reparam.d, tuning.sigma_d, -0.5, 0.5, s.rng).value;
  ReparamMemory r = s.reparam;
  r.d = xi;
  auto cand = evaluate_memory(s, r);
  const bool ok = accept(s.rng, log_ratio_d(s, prior, tuning.sigma_d, xi, cand.loglik));
  if (ok) accept_memory(s, std::move(cand));
  s.tally.record("d", ok);
  return ok;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> memory_box(std::size_t p, std::size_t q) {
  const auto r = static_cast<Eigen::Index>(1 + p + q);
  Eigen::VectorXd hi = Eigen::VectorXd::Ones(r);
  hi[0] = 0.5;
  return {-hi, hi};
}

bool joint_update_memory(ChainState& s, const Eigen::MatrixXd& Sigma, const PriorSpec& prior) {
  const std::size_t p = s.reparam.p(), q = s.reparam.q();
  const auto r = static_cast<Eigen::Index>(s.reparam.dim());
  if (Sigma.rows() != r || Sigma.cols() != r) {
    throw ArgumentError("joint_update_memory: proposal covariance has the wrong dimension");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(Sigma);
  if (llt.info() != Eigen::Success) {
    throw ConfigError("joint_update_memory: proposal covariance is not positive definite");
  }
  const auto [lo, hi] = memory_box(p, q);
  const auto cur_flat = s.reparam.flatten();
  const Eigen::VectorXd cur = Eigen::Map<const Eigen::VectorXd>(cur_flat.data(), r);
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::VectorXd prop = sample_trunc_mvn(cur, L, lo, hi, s.rng).value;

  if (!s.log_box_mass) s.log_box_mass = std::log(mvn_box_probability(cur, Sigma, lo, hi));
  const double log_z_prop = std::log(mvn_box_probability(prop, Sigma, lo, hi));

  auto cand = evaluate_memory(s, ReparamMemory::unflatten({prop.data(), static_cast<std::size_t>(prop.size())}, p, q));
  const double log_a = cand.loglik - s.loglik + prior.log_d_prior(prop[0]) -
                       prior.log_d_prior(cur[0]) + *s.log_box_mass - log_z_prop;
  const bool ok = accept(s.rng, log_a);
  if (ok) {
    accept_memory(s, std::move(cand));
    s.log_box_mass = log_z_prop;
  }
  s.tally.record("memory", ok);
  return ok;
}

namespace {

void require_xA_mode(const ChainState& s) {
  if (s.mode != LikelihoodMode::approximate || !s.ctx) {
    throw UnsupportedOperation("x_A update applies to the approximate likelihood only");
  }
  if (s.ctx->P() > s.ctx->n()) {
    throw UnsupportedOperation("x_A update needs truncation P <= n");
  }
}

double draw_innovation(const InnovationSpec& in, Rng& rng) {
  if (in.family == InnovationFamily::gaussian) return rng.normal();
  return rng.student_t(in.shape.at(0));
}

}  // namespace

double xA_log_density(const ChainState& s, const std::vector<double>& presample) {
  require_xA_mode(s);
  const std::size_t P = s.ctx->P();
  if (presample.size() != P) throw ArgumentError("xA_log_density: length must equal P");
  const auto& x = s.ctx->series().x;
  // Reversed time: the first P observations act as the past of the
  // projected values, and presample[i] = x_{-i} is the (i+1)-th projection.
  AugmentedSeries rev{presample, std::vector<double>(x.begin(), x.begin() + P)};
  const auto c = compute_c(rev, s.filt.pi);
  const double sigma = s.psi.innovation.sigma;
  return -static_cast<double>(P) * std::log(sigma) +
         kernels::omp::sum_log_density(c, s.filt.pi_sum * s.psi.mu, sigma, s.psi.innovation);
}

XaProposal propose_xA(const ChainState& s, Rng& rng) {
  require_xA_mode(s);
  const std::size_t P = s.ctx->P();
  const auto& x = s.ctx->series().x;
  const auto& pi = s.filt.pi.coeffs;
  const double sigma = s.psi.innovation.sigma;
  const double shift = s.filt.pi_sum * s.psi.mu;
  // w = (y_{1-P}, ..., y_0, Y_1, ..., Y_P) with y_{-i} = x_{i+1}.
  std::vector<double> w(2 * P);
  for (std::size_t j = 0; j < P; ++j) w[j] = x[P - 1 - j];
  XaProposal out;
  out.presample.resize(P);
  double logf = 0.0;
  for (std::size_t t = 0; t < P; ++t) {
    const double e = draw_innovation(s.psi.innovation, rng);
    logf += kernels::innovation_logpdf(e, s.psi.innovation);
    double acc = 0.0;
    for (std::size_t k = 1; k <= P; ++k) acc += pi[k] * w[P + t - k];
    w[P + t] = sigma * e + shift - acc;
    out.presample[t] = w[P + t];
  }
  out.log_q = logf - static_cast<double>(P) * std::log(sigma);
  return out;
}

bool update_xA(ChainState& s) {
  require_xA_mode(s);
  auto prop = propose_xA(s, s.rng);
  const double log_q_cur = xA_log_density(s, s.ctx->series().presample);
  const auto old = s.ctx->series().presample;
  s.ctx->set_presample(prop.presample);
  double new_ll = 0.0;
  FilteredSeries filt = s.ctx->filter(s.psi.memory);
  if (!s.prior_only) new_ll = s.ctx->loglik(filt, s.psi.mu, s.psi.innovation);
  const double log_a = new_ll - s.loglik + log_q_cur - prop.log_q;
  const bool ok = accept(s.rng, log_a);
  if (ok) {
    s.filt = std::move(filt);
    s.loglik = new_ll;
  } else {
    s.ctx->set_presample(old);
  }
  s.tally.record("xA", ok);
  return ok;
}

std::size_t SampleMatrix::col_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ArgumentError("no sample column named " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> SampleMatrix::column(const std::string& name) const {
  const std::size_t j = col_index(name);
  std::vector<double> out(rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i, j);
  return out;
}

void SampleMatrix::push_row(const std::vector<double>& row) {
  if (row.size() != columns.size()) throw ArgumentError("push_row: width mismatch");
  data.insert(data.end(), row.begin(), row.end());
}

void ChainConfig::validate() const {
  if (iters <= burnin) throw ConfigError("iters must exceed burnin");
  if (thin == 0) throw ConfigError("thin must be >= 1");
  if (!(std::abs(init_d) < 0.5)) throw ConfigError("initial d must lie in (-1/2, 1/2)");
  innovation.validate();
  if (init_memory && (init_memory->p() != model.p || init_memory->q() != model.q)) {
    throw ConfigError("initial memory does not match the model order");
  }
}

Eigen::MatrixXd default_memory_cov(std::size_t p, std::size_t q, const TuningSpec& tuning) {
  const auto r = static_cast<Eigen::Index>(1 + p + q);
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(r, r) * (tuning.sigma_pacf * tuning.sigma_pacf);
  S(0, 0) = tuning.sigma_d * tuning.sigma_d;
  return S;
}

bool use_gibbs(KernelChoice choice, InnovationFamily family) {
  if (choice == KernelChoice::automatic) return family == InnovationFamily::gaussian;
  return choice == KernelChoice::gibbs;
}

namespace {

double sample_sd(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return x.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

}  // namespace

ChainState initial_state(const std::vector<double>& x, const ChainConfig& config) {
  if (x.empty()) throw DataError("series is empty");
  ReparamMemory start;
  if (config.init_memory) {
    start = *config.init_memory;
  } else {
    start.d = config.init_d;
    start.varphi.assign(config.model.p, 0.0);
    start.vartheta.assign(config.model.q, 0.0);
  }
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  InnovationSpec innov = config.innovation;
  const double sd = sample_sd(x);
  innov.sigma = sd > 0.0 ? sd : 1.0;
  const std::size_t P = config.truncation > 0 ? config.truncation : x.size();
  auto s = ChainState::create(x, start, mean, std::move(innov), config.mode, P,
                              config.prior_only, Rng(config.seed).stream("chain", config.chain_index));
  s.refresh();
  return s;
}

void within_model_sweep(ChainState& s, const ChainConfig& config, const PriorSpec& prior,
                        const TuningSpec& tuning, const Eigen::MatrixXd& Sigma,
                        std::size_t iter) {
  const auto family = s.psi.innovation.family;
  if (use_gibbs(config.mu_kernel, family)) {
    gibbs_update_mu(s, prior);
  } else {
    mh_update_mu(s, tuning, prior);
  }
  if (use_gibbs(config.sigma_kernel, family)) {
    gibbs_update_sigma(s, prior);
  } else {
    mh_update_sigma(s, tuning, prior);
  }
  if (s.reparam.p() + s.reparam.q() == 0) {
    mh_update_d(s, tuning, prior);
  } else {
    joint_update_memory(s, Sigma, prior);
  }
  if (tuning.xA_update_period > 0 && s.mode == LikelihoodMode::approximate &&
      (iter + 1) % tuning.xA_update_period == 0) {
    update_xA(s);
  }
}

ChainResult run_chain(const std::vector<double>& x, const ChainConfig& config,
                      const PriorSpec& prior, const TuningSpec& tuning_in) {
  config.validate();
  prior.validate();
  tuning_in.validate();
  if (config.prior_only && (prior.mu.kind == MuPrior::Kind::flat ||
                            prior.sigma.kind == SigmaPrior::Kind::diffuse)) {
    throw ConfigError("prior-only runs need proper mu and sigma priors");
  }
  ChainState s = initial_state(x, config);

  TuningSpec tuning = tuning_in;
  if (!(tuning.sigma_mu > 0.0)) {
    const double sd = sample_sd(x);
    tuning.sigma_mu = sd > 0.0 ? sd / std::sqrt(static_cast<double>(x.size())) : 0.1;
  }
  const std::size_t p = config.model.p, q = config.model.q;
  Eigen::MatrixXd Sigma = tuning.Sigma_varpi.size() > 0 ? tuning.Sigma_varpi
                                                        : default_memory_cov(p, q, tuning);
  if (Sigma.rows() != static_cast<Eigen::Index>(1 + p + q)) {
    throw ConfigError("Sigma_varpi dimension does not match the model order");
  }

  ChainResult out;
  auto& cols = out.samples.columns;
  cols = {"iter", "d", "mu", "sigma"};
  for (std::size_t k = 1; k <= p; ++k) cols.push_back("varphi_" + std::to_string(k));
  for (std::size_t k = 1; k <= q; ++k) cols.push_back("vartheta_" + std::to_string(k));
  out.samples.data.reserve(((config.iters - config.burnin) / config.thin + 1) * cols.size());

  std::vector<double> row(cols.size());
  for (std::size_t it = 0; it < config.iters; ++it) {
    within_model_sweep(s, config, prior, tuning, Sigma, it);
    s.check_invariants();
    if (it >= config.burnin && (it - config.burnin) % config.thin == 0) {
      row[0] = static_cast<double>(it);
      row[1] = s.reparam.d;
      row[2] = s.psi.mu;
      row[3] = s.psi.innovation.sigma;
      std::copy(s.reparam.varphi.begin(), s.reparam.varphi.end(), row.begin() + 4);
      std::copy(s.reparam.vartheta.begin(), s.reparam.vartheta.end(), row.begin() + 4 + p);
      out.samples.push_row(row);
    }
  }
  out.acceptance = s.tally.rates();
  return out;
}

}  // namespace arfima
