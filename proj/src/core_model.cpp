#include "arfima/core_model.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <string>

#include "arfima/errors.hpp"

namespace arfima {

std::vector<double> ReparamMemory::flatten() const {
  std::vector<double> v;
  v.reserve(dim());
  v.push_back(d);
  v.insert(v.end(), varphi.begin(), varphi.end());
  v.insert(v.end(), vartheta.begin(), vartheta.end());
  return v;
}

ReparamMemory ReparamMemory::unflatten(std::span<const double> v, std::size_t p,
                                       std::size_t q) {
  if (v.size() != 1 + p + q) {
    throw ArgumentError("ReparamMemory::unflatten: expected " +
                        std::to_string(1 + p + q) + " values, got " +
                        std::to_string(v.size()));
  }
  ReparamMemory r;
  r.d = v[0];
  r.varphi.assign(v.begin() + 1, v.begin() + 1 + static_cast<long>(p));
  r.vartheta.assign(v.begin() + 1 + static_cast<long>(p), v.end());
  return r;
}

void InnovationSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ArgumentError("innovation sigma must be positive and finite");
  }
  if (family == InnovationFamily::student_t) {
    if (shape.size() != 1) {
      throw ArgumentError("student_t innovations need exactly one shape value (df)");
    }
    if (!(shape[0] > 2.0)) {
      throw ArgumentError("student_t degrees of freedom must exceed 2 (finite variance)");
    }
  }
}

double CoeffVector::sum() const {
  return std::accumulate(coeffs.begin(), coeffs.end(), 0.0);
}

CoeffVector fi_pi_coeffs(double d, long P) {
  if (P < 0) throw ArgumentError("fi_pi_coeffs: truncation P must be >= 0");
  CoeffVector out;
  out.coeffs.resize(static_cast<std::size_t>(P) + 1);
  out.coeffs[0] = 1.0;
  for (long k = 1; k <= P; ++k) {
    out.coeffs[k] = out.coeffs[k - 1] * (static_cast<double>(k - 1) - d) /
                    static_cast<double>(k);
  }
  return out;
}

CoeffVector fi_psi_coeffs(double d, long P) { return fi_pi_coeffs(-d, P); }

std::vector<double> poly_mul(std::span<const double> a, std::span<const double> b,
                             std::size_t length) {
  std::vector<double> out(length, 0.0);
  for (std::size_t i = 0; i < a.size() && i < length; ++i) {
    if (a[i] == 0.0) continue;
    const std::size_t jmax = std::min(b.size(), length - i);
    for (std::size_t j = 0; j < jmax; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

CoeffVector arfima_pi_coeffs(const MemoryParams& memory, long P) {
  if (P < 0) throw ArgumentError("arfima_pi_coeffs: truncation P must be >= 0");
  try {
    (void)monahan_to_pacf(memory.theta);
  } catch (const DomainError&) {
    throw DomainError("arfima_pi_coeffs: MA polynomial is not invertible");
  }
  const auto len = static_cast<std::size_t>(P) + 1;
  CoeffVector fi = fi_pi_coeffs(memory.d, P);
  if (memory.phi.empty() && memory.theta.empty()) return fi;

  std::vector<double> ar(memory.p() + 1);
  ar[0] = 1.0;
  std::copy(memory.phi.begin(), memory.phi.end(), ar.begin() + 1);
  std::vector<double> num = poly_mul(fi.coeffs, ar, len);

  // Long division by Theta: pi_k = num_k - sum_j theta_j pi_{k-j}.
  const std::size_t q = memory.q();
  for (std::size_t k = 1; k < len; ++k) {
    const std::size_t jmax = std::min(k, q);
    double acc = num[k];
    for (std::size_t j = 1; j <= jmax; ++j) acc -= memory.theta[j - 1] * num[k - j];
    num[k] = acc;
  }
  return CoeffVector{std::move(num)};
}

namespace {

void require_stationary_d(double d, const char* where) {
  if (!(std::abs(d) < 0.5)) {
    throw DomainError(std::string(where) + ": memory parameter d must satisfy |d| < 1/2");
  }
}

}  // namespace

std::vector<double> acv_fid(double d, long maxlag, double sigma) {
  require_stationary_d(d, "acv_fid");
  if (maxlag < 0) throw ArgumentError("acv_fid: maxlag must be >= 0");
  if (!(sigma > 0.0)) throw ArgumentError("acv_fid: sigma must be positive");
  std::vector<double> g(static_cast<std::size_t>(maxlag) + 1);
  g[0] = sigma * sigma * std::exp(std::lgamma(1.0 - 2.0 * d) - 2.0 * std::lgamma(1.0 - d));
  for (long k = 1; k <= maxlag; ++k) {
    g[k] = g[k - 1] * (static_cast<double>(k) - 1.0 + d) / (static_cast<double>(k) - d);
  }
  return g;
}

double acf_fid(double d, long k) {
  require_stationary_d(d, "acf_fid");
  if (k < 0) k = -k;
  double rho = 1.0;
  for (long j = 1; j <= k; ++j) {
    rho *= (static_cast<double>(j) - 1.0 + d) / (static_cast<double>(j) - d);
  }
  return rho;
}

double sdf_arfima(const MemoryParams& memory, double sigma, double freq) {
  require_stationary_d(memory.d, "sdf_arfima");
  if (!(sigma > 0.0)) throw ArgumentError("sdf_arfima: sigma must be positive");
  if (!(freq >= 0.0 && freq <= std::numbers::pi)) {
    throw ArgumentError("sdf_arfima: frequency must lie in [0, pi]");
  }
  if (freq == 0.0 && memory.d > 0.0) {
    throw DomainError("sdf_arfima: spectral density is infinite at frequency 0 for d > 0");
  }
  const std::complex<double> z = std::polar(1.0, -freq);
  auto eval = [&](const std::vector<double>& c) {
    std::complex<double> acc = 1.0, zk = 1.0;
    for (double ck : c) {
      zk *= z;
      acc += ck * zk;
    }
    return std::norm(acc);
  };
  const double ar = eval(memory.phi);
  if (ar == 0.0) throw DomainError("sdf_arfima: AR polynomial vanishes on the unit circle");
  const double fi = memory.d == 0.0 ? 1.0 : std::pow(2.0 * std::sin(freq / 2.0), -2.0 * memory.d);
  return sigma * sigma / (2.0 * std::numbers::pi) * eval(memory.theta) / ar * fi;
}

std::vector<double> monahan_to_pacf(std::span<const double> phi) {
  const std::size_t p = phi.size();
  std::vector<double> cur(phi.begin(), phi.end());
  std::vector<double> pacf(p);
  std::vector<double> next(p);
  for (std::size_t k = p; k >= 1; --k) {
    const double a = cur[k - 1];
    if (!(std::abs(a) < 1.0)) {
      throw DomainError("coefficients not in stationarity region (partial autocorrelation " +
                        std::to_string(k) + " has modulus >= 1)");
    }
    pacf[k - 1] = a;
    const double denom = 1.0 - a * a;
    for (std::size_t i = 1; i < k; ++i) {
      next[i - 1] = (cur[i - 1] - a * cur[k - i - 1]) / denom;
    }
    std::copy(next.begin(), next.begin() + static_cast<long>(k - 1), cur.begin());
  }
  return pacf;
}

std::vector<double> pacf_to_monahan(std::span<const double> varphi) {
  const std::size_t p = varphi.size();
  for (double v : varphi) {
    if (!(std::abs(v) < 1.0)) {
      throw ArgumentError("partial autocorrelations must lie strictly inside (-1, 1)");
    }
  }
  std::vector<double> cur(p), prev(p);
  for (std::size_t k = 1; k <= p; ++k) {
    const double a = varphi[k - 1];
    std::copy(cur.begin(), cur.begin() + static_cast<long>(k - 1), prev.begin());
    for (std::size_t i = 1; i < k; ++i) cur[i - 1] = prev[i - 1] + a * prev[k - i - 1];
    cur[k - 1] = a;
  }
  return cur;
}

bool is_stationary_invertible(const MemoryParams& memory) {
  if (!(std::abs(memory.d) < 0.5)) return false;
  try {
    (void)monahan_to_pacf(memory.phi);
    (void)monahan_to_pacf(memory.theta);
  } catch (const DomainError&) {
    return false;
  }
  return true;
}

MemoryParams to_memory(const ReparamMemory& reparam) {
  return MemoryParams{reparam.d, pacf_to_monahan(reparam.varphi),
                      pacf_to_monahan(reparam.vartheta)};
}

ReparamMemory to_reparam(const MemoryParams& memory) {
  return ReparamMemory{memory.d, monahan_to_pacf(memory.phi), monahan_to_pacf(memory.theta)};
}

}  // namespace arfima
