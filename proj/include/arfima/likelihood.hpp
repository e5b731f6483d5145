#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "arfima/core_model.hpp"
#include "arfima/fft_convolve.hpp"

namespace arfima {

/// Observed series plus the unobserved pre-sample used by the conditional
/// (truncated AR) likelihood. presample[i] holds x_{-i}, i.e. presample[0]
/// is x_0 and presample[P-1] is x_{1-P}.
struct AugmentedSeries {
  std::vector<double> x;
  std::vector<double> presample;

  std::size_t n() const { return x.size(); }
  std::size_t P() const { return presample.size(); }

  /// (x_{1-P}, ..., x_0, x_1, ..., x_n): time order, length P + n.
  std::vector<double> stacked() const;

  /// Pre-sample of length P filled with the sample mean of x.
  static AugmentedSeries with_mean_presample(std::vector<double> x, std::size_t P);

  void validate() const;
};

enum class LikelihoodMode { exact, approximate };

/// c_t = sum_{k=0}^P pi_k x_{t-k}, t = 1..n, via FFT.
std::vector<double> compute_c(const AugmentedSeries& aug, const CoeffVector& pi);

/// Same quantity by the O(nP) direct sum (serial reference kernel).
std::vector<double> compute_c_direct(const AugmentedSeries& aug, const CoeffVector& pi);

/// Standardised innovation log density log f(z; 0, 1, shape).
double innovation_logpdf(double z, InnovationFamily family, std::span<const double> shape);

/// Conditional log-likelihood
///   -n log sigma + sum_t log f((c_t - Pi_P mu) / sigma)
/// with pi computed from psi.memory at truncation P = aug.P().
double approx_loglik(const AugmentedSeries& aug, const ProcessParams& psi);

/// Filter state for one memory parameter: pi, Pi_P and the c-vector.
struct FilteredSeries {
  CoeffVector pi;
  double pi_sum = 1.0;
  std::vector<double> c;
};

/// Cached FFT machinery for repeated conditional-likelihood evaluations on a
/// fixed observed series. Not thread-safe; one per chain.
class LikelihoodContext {
 public:
  explicit LikelihoodContext(AugmentedSeries aug);

  const AugmentedSeries& series() const { return aug_; }
  std::size_t n() const { return aug_.n(); }
  std::size_t P() const { return aug_.P(); }

  /// Replace the pre-sample (same length) and refresh the cached spectrum.
  void set_presample(std::vector<double> presample);

  FilteredSeries filter(const MemoryParams& memory);

  /// Conditional log-likelihood for an already-filtered series.
  double loglik(const FilteredSeries& f, double mu, const InnovationSpec& innovation) const;

 private:
  AugmentedSeries aug_;
  FftConvolver conv_;
};

/// Exact Gaussian FI(d) log-likelihood with its reusable pieces.
struct ExactLoglik {
  double loglik = 0.0;
  double logdet = 0.0;  ///< log det Sigma_d (unit innovation variance)
  double Q = 0.0;       ///< (x - mu 1)' Sigma_d^{-1} (x - mu 1)
};

ExactLoglik exact_loglik(std::span<const double> x, double mu, double sigma, double d);

/// Durbin-Levinson recursion on an autocovariance sequence. After k calls to
/// advance(), coeffs() holds the one-step predictor of x_{k+1} from
/// x_k, ..., x_1 (coeffs()[j-1] multiplies x_{k+1-j}) and variance() its
/// prediction error variance.
class DurbinLevinson {
 public:
  explicit DurbinLevinson(std::span<const double> gamma);

  std::size_t step() const { return step_; }
  std::span<const double> coeffs() const { return {phi_.data(), step_}; }
  double variance() const { return v_; }

  /// Move from predicting x_{k+1} to predicting x_{k+2}.
  void advance();

 private:
  std::vector<double> gamma_;
  std::vector<double> phi_;
  std::vector<double> scratch_;
  std::size_t step_ = 0;
  double v_ = 0.0;
};

/// log det Sigma and the Gram matrix G[a][b] = u_a' Sigma^{-1} u_b for a set of
/// vectors, Sigma the Toeplitz matrix of gamma. O(n^2), never materialised.
struct ToeplitzGram {
  double logdet = 0.0;
  std::vector<std::vector<double>> gram;
};

ToeplitzGram toeplitz_gram(std::span<const double> gamma,
                           std::span<const std::span<const double>> vectors);

/// Pieces of the exact FI(d) likelihood that do not depend on (mu, sigma):
/// with y = x - center,
///   Q(mu) = qyy - 2 (mu - center) qy1 + (mu - center)^2 q11.
struct ExactPieces {
  double d = 0.0;
  double center = 0.0;
  double logdet = 0.0;
  double qyy = 0.0;
  double qy1 = 0.0;
  double q11 = 0.0;
  std::size_t n = 0;

  double Q(double mu) const;
  double loglik(double mu, double sigma) const;
};

ExactPieces exact_pieces(std::span<const double> x, double d);

}  // namespace arfima
