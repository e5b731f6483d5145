#include "arfima/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "arfima/errors.hpp"
#include "arfima/fft_convolve.hpp"
#include "arfima/likelihood.hpp"
#include "arfima/rng.hpp"

namespace arfima {

namespace {

// Zero-mean unit-innovation FI(d) path of length n.
std::vector<double> fid_core(std::size_t n, double d, double sigma, Rng& rng) {
  const auto gamma = acv_fid(d, static_cast<long>(n) - 1, sigma);
  DurbinLevinson dl(gamma);
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) dl.advance();
    const auto phi = dl.coeffs();
    double pred = 0.0;
    for (std::size_t j = 1; j <= t; ++j) pred += phi[j - 1] * x[t - j];
    x[t] = pred + std::sqrt(dl.variance()) * rng.normal();
  }
  return x;
}

}  // namespace

std::vector<double> simulate_fid_exact(std::size_t n, double d, double mu, double sigma,
                                       std::uint64_t seed) {
  if (n == 0) throw ArgumentError("simulate: n must be >= 1");
  if (!(std::abs(d) < 0.5)) throw DomainError("simulate: d must lie in (-1/2, 1/2)");
  if (!(sigma > 0.0)) throw DomainError("simulate: sigma must be positive");
  Rng rng = Rng(seed).stream("simulate");
  auto x = fid_core(n, d, sigma, rng);
  for (double& v : x) v += mu;
  return x;
}

void SimSpec::validate() const {
  if (n == 0) throw ArgumentError("simulate: n must be >= 1");
  if (!(std::abs(memory.d) < 0.5)) {
    throw ArgumentError("simulate: d must lie in (-1/2, 1/2), got " + std::to_string(memory.d));
  }
  if (!is_stationary_invertible(memory)) {
    throw ArgumentError("simulate: AR part must be stationary and MA part invertible");
  }
  if (!std::isfinite(mu)) throw ArgumentError("simulate: mu must be finite");
  try {
    innovation.validate();
  } catch (const std::exception& e) {
    throw ArgumentError(std::string("simulate: ") + e.what());
  }
}

std::size_t SimSpec::resolved_burnin() const {
  if (burnin) return *burnin;
  return 10 * std::max<std::size_t>({memory.p(), memory.q(), 50});
}

std::vector<double> simulate_arfima(const SimSpec& spec) {
  spec.validate();
  const auto& m = spec.memory;
  const double sigma = spec.innovation.sigma;
  const bool gaussian = spec.innovation.family == InnovationFamily::gaussian;
  const bool pure_fi = m.p() == 0 && m.q() == 0;
  Rng rng = Rng(spec.seed).stream("simulate");

  if (gaussian && pure_fi) {
    auto x = fid_core(spec.n, m.d, sigma, rng);
    for (double& v : x) v += spec.mu;
    return x;
  }

  const std::size_t burn = spec.resolved_burnin();
  const std::size_t N = spec.n + burn;
  std::vector<double> y;
  if (gaussian) {
    y = fid_core(N, m.d, sigma, rng);
  } else {
    std::vector<double> eps(N);
    const double df = spec.innovation.shape.at(0);
    for (double& e : eps) e = sigma * rng.student_t(df);
    const auto psi = fi_psi_coeffs(m.d, static_cast<long>(N) - 1);
    y = fft_linear_convolve(eps, psi.coeffs);
    y.resize(N);
  }

  // Phi(B) X = Theta(B) Y from zero initial conditions.
  std::vector<double> x(N);
  for (std::size_t t = 0; t < N; ++t) {
    double v = y[t];
    for (std::size_t k = 1; k <= m.q() && k <= t; ++k) v += m.theta[k - 1] * y[t - k];
    for (std::size_t k = 1; k <= m.p() && k <= t; ++k) v -= m.phi[k - 1] * x[t - k];
    x[t] = v;
  }
  std::vector<double> out(x.begin() + static_cast<long>(burn), x.end());
  for (double& v : out) v += spec.mu;
  return out;
}

}  // namespace arfima
