#include "arfima/kernels.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "arfima/errors.hpp"

namespace arfima::kernels {

namespace {

// Normalising constant of the standardised density, hoisted out of loops.
struct LogDensity {
  InnovationFamily family;
  double df = 0.0;
  double log_norm = 0.0;

  explicit LogDensity(const InnovationSpec& in) : family(in.family) {
    if (family == InnovationFamily::gaussian) {
      log_norm = -0.5 * std::log(2.0 * std::numbers::pi);
    } else {
      if (in.shape.size() != 1 || !(in.shape[0] > 2.0)) {
        throw ArgumentError("student_t innovations need df > 2");
      }
      df = in.shape[0];
      log_norm = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                 0.5 * std::log(df * std::numbers::pi);
    }
  }

  double kernel(double z) const {
    if (family == InnovationFamily::gaussian) return -0.5 * z * z;
    return -0.5 * (df + 1.0) * std::log1p(z * z / df);
  }
};

// Orthonormal basis of polynomials of degree <= order on `scale` points.
std::vector<double> poly_basis(std::size_t scale, int order) {
  const std::size_t m = static_cast<std::size_t>(order) + 1;
  std::vector<double> q(m * scale);
  const double half = 0.5 * static_cast<double>(scale - 1);
  for (std::size_t j = 0; j < m; ++j) {
    double* col = &q[j * scale];
    for (std::size_t i = 0; i < scale; ++i) {
      const double t = half > 0 ? (static_cast<double>(i) - half) / half : 0.0;
      col[i] = std::pow(t, static_cast<double>(j));
    }
    // Two passes of modified Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        const double* prev = &q[k * scale];
        double dot = 0.0;
        for (std::size_t i = 0; i < scale; ++i) dot += prev[i] * col[i];
        for (std::size_t i = 0; i < scale; ++i) col[i] -= dot * prev[i];
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < scale; ++i) norm += col[i] * col[i];
    norm = std::sqrt(norm);
    if (norm == 0.0) throw ArgumentError("DFA window too short for the detrending order");
    for (std::size_t i = 0; i < scale; ++i) col[i] /= norm;
  }
  return q;
}

double window_rss(const double* y, std::size_t scale, const std::vector<double>& basis,
                  std::vector<double>& resid) {
  const std::size_t m = basis.size() / scale;
  resid.assign(y, y + scale);
  for (std::size_t j = 0; j < m; ++j) {
    const double* col = &basis[j * scale];
    double dot = 0.0;
    for (std::size_t i = 0; i < scale; ++i) dot += col[i] * resid[i];
    for (std::size_t i = 0; i < scale; ++i) resid[i] -= dot * col[i];
  }
  double rss = 0.0;
  for (double r : resid) rss += r * r;
  return rss;
}

void check_conv_sizes(std::span<const double> z, std::span<const double> pi,
                      std::span<const double> c) {
  if (pi.empty() || z.size() != pi.size() - 1 + c.size()) {
    throw ArgumentError("convolve_direct: augmented series must have length P + n");
  }
}

void check_dfa(std::span<const double> profile, std::size_t scale, int order) {
  if (order < 0) throw ArgumentError("DFA order must be >= 0");
  if (scale < static_cast<std::size_t>(order) + 2 || scale > profile.size()) {
    throw ArgumentError("DFA scale out of range");
  }
}

// Window start offsets: forward from 0, backward from the end.
std::vector<std::size_t> dfa_offsets(std::size_t n, std::size_t scale) {
  const std::size_t w = n / scale;
  std::vector<std::size_t> off;
  off.reserve(2 * w);
  for (std::size_t k = 0; k < w; ++k) off.push_back(k * scale);
  for (std::size_t k = 0; k < w; ++k) off.push_back(n - (k + 1) * scale);
  return off;
}

}  // namespace

double innovation_logpdf(double z, const InnovationSpec& innovation) {
  const LogDensity ld(innovation);
  return ld.log_norm + ld.kernel(z);
}

namespace serial {

void convolve_direct(std::span<const double> z, std::span<const double> pi, std::span<double> c) {
  check_conv_sizes(z, pi, c);
  const std::size_t P = pi.size() - 1;
  for (std::size_t i = 0; i < c.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k <= P; ++k) acc += pi[k] * z[i + P - k];
    c[i] = acc;
  }
}

double sum_log_density(std::span<const double> c, double shift, double sigma,
                       const InnovationSpec& innovation) {
  const LogDensity ld(innovation);
  const double inv = 1.0 / sigma;
  double acc = 0.0;
  for (double v : c) acc += ld.kernel((v - shift) * inv);
  return acc + static_cast<double>(c.size()) * ld.log_norm;
}

double sum_sq_dev(std::span<const double> c, double shift) {
  double acc = 0.0;
  for (double v : c) acc += (v - shift) * (v - shift);
  return acc;
}

double dfa_fluctuation_sq(std::span<const double> profile, std::size_t scale, int order) {
  check_dfa(profile, scale, order);
  const auto basis = poly_basis(scale, order);
  const auto offsets = dfa_offsets(profile.size(), scale);
  std::vector<double> resid;
  double acc = 0.0;
  for (std::size_t off : offsets) acc += window_rss(profile.data() + off, scale, basis, resid);
  return acc / static_cast<double>(offsets.size() * scale);
}

}  // namespace serial

namespace omp {

void convolve_direct(std::span<const double> z, std::span<const double> pi, std::span<double> c) {
  check_conv_sizes(z, pi, c);
  const long P = static_cast<long>(pi.size()) - 1;
  const long n = static_cast<long>(c.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    const double* zi = z.data() + i + P;
#pragma omp simd reduction(+ : acc)
    for (long k = 0; k <= P; ++k) acc += pi[k] * zi[-k];
    c[i] = acc;
  }
}

double sum_log_density(std::span<const double> c, double shift, double sigma,
                       const InnovationSpec& innovation) {
  const LogDensity ld(innovation);
  const double inv = 1.0 / sigma;
  const long n = static_cast<long>(c.size());
  double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) schedule(static)
  for (long i = 0; i < n; ++i) acc += ld.kernel((c[i] - shift) * inv);
  return acc + static_cast<double>(n) * ld.log_norm;
}

double sum_sq_dev(std::span<const double> c, double shift) {
  const long n = static_cast<long>(c.size());
  double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) schedule(static)
  for (long i = 0; i < n; ++i) acc += (c[i] - shift) * (c[i] - shift);
  return acc;
}

double dfa_fluctuation_sq(std::span<const double> profile, std::size_t scale, int order) {
  check_dfa(profile, scale, order);
  const auto basis = poly_basis(scale, order);
  const auto offsets = dfa_offsets(profile.size(), scale);
  const long w = static_cast<long>(offsets.size());
  double acc = 0.0;
#pragma omp parallel reduction(+ : acc)
  {
    std::vector<double> resid;
#pragma omp for schedule(static)
    for (long k = 0; k < w; ++k) acc += window_rss(profile.data() + offsets[k], scale, basis, resid);
  }
  return acc / static_cast<double>(offsets.size() * scale);
}

}  // namespace omp

}  // namespace arfima::kernels
