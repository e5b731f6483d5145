#pragma once

// Data-parallel inner loops. Each kernel exists twice: a plain serial
// reference (kept for testing and as the benchmark baseline) and an OpenMP
// version with identical semantics. The OpenMP reductions may reorder
// floating-point sums, so results agree to rounding, not bitwise.

#include <cstddef>
#include <span>

#include "arfima/core_model.hpp"

namespace arfima::kernels {

namespace serial {

/// c[i] = sum_{k=0}^{P} pi[k] * z[i + P - k], i = 0..n-1, where
/// z = (x_{1-P}, ..., x_0, x_1, ..., x_n) has length P + n and P = pi.size()-1.
void convolve_direct(std::span<const double> z, std::span<const double> pi, std::span<double> c);

/// sum_i log f((c[i] - shift) / sigma) for the standardised innovation law.
double sum_log_density(std::span<const double> c, double shift, double sigma,
                       const InnovationSpec& innovation);

/// sum_i (c[i] - shift)^2
double sum_sq_dev(std::span<const double> c, double shift);

/// Mean squared residual of per-window polynomial detrending of `profile`
/// over non-overlapping windows of length `scale`, taken from both ends.
double dfa_fluctuation_sq(std::span<const double> profile, std::size_t scale, int order);

}  // namespace serial

namespace omp {

void convolve_direct(std::span<const double> z, std::span<const double> pi, std::span<double> c);
double sum_log_density(std::span<const double> c, double shift, double sigma,
                       const InnovationSpec& innovation);
double sum_sq_dev(std::span<const double> c, double shift);
double dfa_fluctuation_sq(std::span<const double> profile, std::size_t scale, int order);

}  // namespace omp

/// Standardised log density log f(z; 0, 1, shape).
double innovation_logpdf(double z, const InnovationSpec& innovation);

}  // namespace arfima::kernels
