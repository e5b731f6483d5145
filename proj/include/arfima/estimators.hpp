#pragma once
// Classical (non-Bayesian) estimators of the memory parameter d, used as
// comparators. Tuning follows common textbook defaults.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace arfima {

enum class EstimatorMethod { RS, GPH, DFA };

std::string to_string(EstimatorMethod m);

struct EstimatorResult {
  double d_hat = 0.0;
  std::optional<double> stderr_;
  EstimatorMethod method = EstimatorMethod::RS;
  std::map<std::string, double> diagnostics;
};

/// Rescaled adjusted range over dyadic block sizes from `min_block` up to
/// n/2; d = slope(log R/S on log block) - 1/2.
EstimatorResult estimate_rs(std::span<const double> x, std::size_t min_block = 16);

/// Log-periodogram regression on the first m Fourier frequencies
/// (default m = floor(sqrt(n))).
EstimatorResult estimate_gph(std::span<const double> x, std::optional<std::size_t> bandwidth = {});

struct DfaOptions {
  int order = 1;
  std::size_t min_scale = 10;
  std::size_t max_scale = 0;  ///< 0: n / 4
  std::size_t n_scales = 12;
};

/// Detrended fluctuation analysis; d = slope(log F on log s) - 1/2.
EstimatorResult estimate_dfa(std::span<const double> x, const DfaOptions& opt = {});

/// Periodogram |sum_t x_t e^{-i lambda_j t}|^2 / (2 pi n) at lambda_j = 2 pi j / n,
/// j = 1..m, after removing the sample mean.
std::vector<double> periodogram(std::span<const double> x, std::size_t m);

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
};

/// Ordinary least squares y = a + b x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace arfima
