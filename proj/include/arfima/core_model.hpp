#pragma once

// ARFIMA(p,d,q) process definitions.
//
// Sign convention: polynomials are written with a PLUS sign throughout,
//
//     Phi(z)   = 1 + phi_1 z + ... + phi_p z^p
//     Theta(z) = 1 + theta_1 z + ... + theta_q z^q
//
// and the process is Phi(B) (1-B)^d X_t = Theta(B) eps_t. Most software
// (R's arima, statsmodels) uses 1 - sum phi_k z^k for the AR side, so an
// AR coefficient of 0.92 here is -0.92 there.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace arfima {

/// Full memory parameter (phi, theta, d), plus-convention polynomials.
struct MemoryParams {
  double d = 0.0;
  std::vector<double> phi;
  std::vector<double> theta;

  std::size_t p() const { return phi.size(); }
  std::size_t q() const { return theta.size(); }
};

/// Memory parameter mapped to the unit hypercube: d together with the
/// partial autocorrelations of the AR and MA polynomials.
struct ReparamMemory {
  double d = 0.0;
  std::vector<double> varphi;
  std::vector<double> vartheta;

  std::size_t p() const { return varphi.size(); }
  std::size_t q() const { return vartheta.size(); }
  std::size_t dim() const { return 1 + varphi.size() + vartheta.size(); }

  /// Flattened (d, varphi..., vartheta...).
  std::vector<double> flatten() const;
  static ReparamMemory unflatten(std::span<const double> v, std::size_t p,
                                 std::size_t q);
};

enum class InnovationFamily { gaussian, student_t };

/// Location-scale innovation law. For student_t the standardised density is
/// the unit-scale t (not unit variance); shape[0] holds the degrees of freedom.
struct InnovationSpec {
  InnovationFamily family = InnovationFamily::gaussian;
  double sigma = 1.0;
  std::vector<double> shape;

  void validate() const;
};

/// Everything the likelihood needs: mean, innovation law and memory.
struct ProcessParams {
  double mu = 0.0;
  InnovationSpec innovation;
  MemoryParams memory;
};

/// AR(inf) / MA(inf) expansion weights coeffs[0..P].
struct CoeffVector {
  std::vector<double> coeffs;

  std::size_t truncation() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  double sum() const;
  double operator[](std::size_t k) const { return coeffs[k]; }
};

/// Weights of (1-B)^d up to lag P, by the ratio recurrence
/// pi_k = pi_{k-1} (k-1-d)/k.
CoeffVector fi_pi_coeffs(double d, long P);

/// Weights of (1-B)^{-d}; equal to fi_pi_coeffs(-d, P).
CoeffVector fi_psi_coeffs(double d, long P);

/// Weights of Theta(z)^{-1} Phi(z) (1-z)^d up to lag P.
/// Throws DomainError if Theta is not invertible.
CoeffVector arfima_pi_coeffs(const MemoryParams& memory, long P);

/// FI(d) autocovariances gamma(0..maxlag) with innovation scale sigma.
std::vector<double> acv_fid(double d, long maxlag, double sigma = 1.0);

/// FI(d) autocorrelation at lag k.
double acf_fid(double d, long k);

/// ARFIMA spectral density at frequency freq in (0, pi].
double sdf_arfima(const MemoryParams& memory, double sigma, double freq);

/// phi -> partial autocorrelations. Throws DomainError when phi is outside
/// the stationarity region.
std::vector<double> monahan_to_pacf(std::span<const double> phi);

/// Partial autocorrelations -> phi. Throws ArgumentError if any |v| >= 1.
std::vector<double> pacf_to_monahan(std::span<const double> varphi);

/// |d| < 1/2, Phi causal and Theta invertible.
bool is_stationary_invertible(const MemoryParams& memory);

MemoryParams to_memory(const ReparamMemory& reparam);
ReparamMemory to_reparam(const MemoryParams& memory);

/// Convolve two coefficient sequences, truncated to `length` terms.
std::vector<double> poly_mul(std::span<const double> a, std::span<const double> b,
                             std::size_t length);

}  // namespace arfima
