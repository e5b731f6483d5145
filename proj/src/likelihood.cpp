#include "arfima/likelihood.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "arfima/errors.hpp"
#include "arfima/kernels.hpp"

namespace arfima {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

}  // namespace

std::vector<double> AugmentedSeries::stacked() const {
  std::vector<double> z;
  z.reserve(P() + n());
  z.insert(z.end(), presample.rbegin(), presample.rend());
  z.insert(z.end(), x.begin(), x.end());
  return z;
}

AugmentedSeries AugmentedSeries::with_mean_presample(std::vector<double> x, std::size_t P) {
  if (x.empty()) throw DataError("series is empty");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  AugmentedSeries aug{std::move(x), std::vector<double>(P, mean)};
  aug.validate();
  return aug;
}

void AugmentedSeries::validate() const {
  if (x.empty()) throw DataError("series is empty");
  for (double v : x) {
    if (!std::isfinite(v)) throw DataError("series contains non-finite values");
  }
  for (double v : presample) {
    if (!std::isfinite(v)) throw DataError("pre-sample contains non-finite values");
  }
}

std::vector<double> compute_c(const AugmentedSeries& aug, const CoeffVector& pi) {
  if (pi.coeffs.size() != aug.P() + 1) {
    throw ArgumentError("compute_c: need P + 1 = " + std::to_string(aug.P() + 1) +
                        " coefficients, got " + std::to_string(pi.coeffs.size()));
  }
  const auto z = aug.stacked();
  FftConvolver conv(z, pi.coeffs.size(), aug.P());
  std::vector<double> c(aug.n());
  conv.apply(pi.coeffs, aug.P(), c);
  return c;
}

std::vector<double> compute_c_direct(const AugmentedSeries& aug, const CoeffVector& pi) {
  if (pi.coeffs.size() != aug.P() + 1) {
    throw ArgumentError("compute_c_direct: coefficient count must be P + 1");
  }
  const auto z = aug.stacked();
  std::vector<double> c(aug.n());
  kernels::serial::convolve_direct(z, pi.coeffs, c);
  return c;
}

double innovation_logpdf(double z, InnovationFamily family, std::span<const double> shape) {
  InnovationSpec spec{family, 1.0, {shape.begin(), shape.end()}};
  spec.validate();
  return kernels::innovation_logpdf(z, spec);
}

namespace {

void validate_params(const ProcessParams& psi) {
  psi.innovation.validate();
  if (!std::isfinite(psi.mu)) throw DomainError("mean must be finite");
  if (!is_stationary_invertible(psi.memory)) {
    throw DomainError("memory parameters are not stationary and invertible");
  }
}

}  // namespace

double approx_loglik(const AugmentedSeries& aug, const ProcessParams& psi) {
  validate_params(psi);
  aug.validate();
  const CoeffVector pi = arfima_pi_coeffs(psi.memory, static_cast<long>(aug.P()));
  const auto c = compute_c(aug, pi);
  const double sigma = psi.innovation.sigma;
  return -static_cast<double>(aug.n()) * std::log(sigma) +
         kernels::serial::sum_log_density(c, pi.sum() * psi.mu, sigma, psi.innovation);
}

LikelihoodContext::LikelihoodContext(AugmentedSeries aug)
    : aug_((aug.validate(), std::move(aug))), conv_(aug_.stacked(), aug_.P() + 1, aug_.P()) {}

void LikelihoodContext::set_presample(std::vector<double> presample) {
  if (presample.size() != aug_.P()) {
    throw ArgumentError("set_presample: length must equal P");
  }
  aug_.presample = std::move(presample);
  conv_.set_signal(aug_.stacked());
}

FilteredSeries LikelihoodContext::filter(const MemoryParams& memory) {
  FilteredSeries f;
  f.pi = arfima_pi_coeffs(memory, static_cast<long>(aug_.P()));
  f.pi_sum = f.pi.sum();
  f.c.resize(aug_.n());
  conv_.apply(f.pi.coeffs, aug_.P(), f.c);
  return f;
}

double LikelihoodContext::loglik(const FilteredSeries& f, double mu,
                                 const InnovationSpec& innovation) const {
  const double sigma = innovation.sigma;
  return -static_cast<double>(f.c.size()) * std::log(sigma) +
         kernels::omp::sum_log_density(f.c, f.pi_sum * mu, sigma, innovation);
}

DurbinLevinson::DurbinLevinson(std::span<const double> gamma)
    : gamma_(gamma.begin(), gamma.end()), phi_(gamma.size()), scratch_(gamma.size()) {
  if (gamma_.empty()) throw ArgumentError("DurbinLevinson: empty autocovariance");
  v_ = gamma_[0];
  if (!(v_ > 0.0)) throw NumericalError("DurbinLevinson: gamma(0) must be positive");
}

void DurbinLevinson::advance() {
  const std::size_t k = step_;
  if (k + 1 >= gamma_.size()) {
    throw ArgumentError("DurbinLevinson: autocovariance sequence exhausted");
  }
  double num = gamma_[k + 1];
  for (std::size_t j = 1; j <= k; ++j) num -= phi_[j - 1] * gamma_[k + 1 - j];
  const double a = num / v_;
  for (std::size_t j = 1; j <= k; ++j) scratch_[j - 1] = phi_[j - 1] - a * phi_[k - j];
  std::copy_n(scratch_.begin(), k, phi_.begin());
  phi_[k] = a;
  v_ *= (1.0 - a * a);
  if (!(v_ > 0.0)) {
    throw NumericalError("Durbin-Levinson: prediction variance is not positive at step " +
                         std::to_string(k + 1) + " (autocovariance not positive definite)");
  }
  ++step_;
}

ToeplitzGram toeplitz_gram(std::span<const double> gamma,
                           std::span<const std::span<const double>> vectors) {
  const std::size_t m = vectors.size();
  const std::size_t n = m == 0 ? gamma.size() : vectors[0].size();
  for (const auto& v : vectors) {
    if (v.size() != n) throw ArgumentError("toeplitz_gram: vectors differ in length");
  }
  if (gamma.size() < n) throw ArgumentError("toeplitz_gram: autocovariance too short");
  ToeplitzGram out;
  out.gram.assign(m, std::vector<double>(m, 0.0));
  DurbinLevinson dl(gamma.first(n));
  std::vector<double> e(m);
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) dl.advance();
    const auto phi = dl.coeffs();
    const double v = dl.variance();
    for (std::size_t a = 0; a < m; ++a) {
      const auto& u = vectors[a];
      double pred = 0.0;
      for (std::size_t j = 1; j <= t; ++j) pred += phi[j - 1] * u[t - j];
      e[a] = u[t] - pred;
    }
    out.logdet += std::log(v);
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a; b < m; ++b) out.gram[a][b] += e[a] * e[b] / v;
    }
  }
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < a; ++b) out.gram[a][b] = out.gram[b][a];
  }
  return out;
}

ExactLoglik exact_loglik(std::span<const double> x, double mu, double sigma, double d) {
  if (x.empty()) throw ArgumentError("exact_loglik: need n >= 1");
  if (!(sigma > 0.0)) throw DomainError("exact_loglik: sigma must be positive");
  const auto gamma = acv_fid(d, static_cast<long>(x.size()) - 1, 1.0);
  std::vector<double> y(x.begin(), x.end());
  for (double& v : y) v -= mu;
  const std::span<const double> ys[] = {y};
  const auto g = toeplitz_gram(gamma, ys);
  ExactLoglik out;
  out.logdet = g.logdet;
  out.Q = g.gram[0][0];
  const double n = static_cast<double>(x.size());
  out.loglik = -n * std::log(sigma) - 0.5 * out.logdet - 0.5 * out.Q / (sigma * sigma) -
               0.5 * n * kLog2Pi;
  return out;
}

double ExactPieces::Q(double mu) const {
  const double m = mu - center;
  return qyy - 2.0 * m * qy1 + m * m * q11;
}

double ExactPieces::loglik(double mu, double sigma) const {
  const double nn = static_cast<double>(n);
  return -nn * std::log(sigma) - 0.5 * logdet - 0.5 * Q(mu) / (sigma * sigma) - 0.5 * nn * kLog2Pi;
}

ExactPieces exact_pieces(std::span<const double> x, double d) {
  if (x.empty()) throw ArgumentError("exact_pieces: need n >= 1");
  const auto gamma = acv_fid(d, static_cast<long>(x.size()) - 1, 1.0);
  ExactPieces p;
  p.d = d;
  p.n = x.size();
  p.center = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  std::vector<double> y(x.begin(), x.end());
  for (double& v : y) v -= p.center;
  const std::vector<double> ones(x.size(), 1.0);
  const std::span<const double> vs[] = {y, ones};
  const auto g = toeplitz_gram(gamma, vs);
  p.logdet = g.logdet;
  p.qyy = g.gram[0][0];
  p.qy1 = g.gram[0][1];
  p.q11 = g.gram[1][1];
  return p;
}

}  // namespace arfima
