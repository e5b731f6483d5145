#include "arfima/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "arfima/errors.hpp"
#include "arfima/kernels.hpp"

namespace arfima {

std::string to_string(EstimatorMethod m) {
  switch (m) {
    case EstimatorMethod::RS: return "RS";
    case EstimatorMethod::GPH: return "GPH";
    case EstimatorMethod::DFA: return "DFA";
  }
  return "?";
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("fit_line: need >= 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ArgumentError("fit_line: regressor is constant");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return f;
}

namespace {

void check_series(std::span<const double> x, std::size_t min_n, const char* what) {
  if (x.size() < min_n) {
    throw ArgumentError(std::string(what) + ": need at least " + std::to_string(min_n) +
                        " observations");
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw DataError(std::string(what) + ": non-finite value");
  }
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) throw DataError(std::string(what) + ": series is constant");
}

}  // namespace

EstimatorResult estimate_rs(std::span<const double> x, std::size_t min_block) {
  check_series(x, 64, "R/S");
  if (min_block < 4) throw ArgumentError("R/S: minimum block must be >= 4");
  const std::size_t n = x.size();
  std::vector<double> ls, lrs;
  std::vector<double> dev;
  for (std::size_t s = min_block; s <= n / 2; s *= 2) {
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t b = 0; b + s <= n; b += s) {
      const auto blk = x.subspan(b, s);
      const double m = std::accumulate(blk.begin(), blk.end(), 0.0) / static_cast<double>(s);
      double cum = 0.0, hi = 0.0, lo = 0.0, ss = 0.0;
      for (double v : blk) {
        cum += v - m;
        hi = std::max(hi, cum);
        lo = std::min(lo, cum);
        ss += (v - m) * (v - m);
      }
      const double sd = std::sqrt(ss / static_cast<double>(s));
      if (sd > 0.0) {
        acc += (hi - lo) / sd;
        ++used;
      }
    }
    if (used > 0) {
      ls.push_back(std::log(static_cast<double>(s)));
      lrs.push_back(std::log(acc / static_cast<double>(used)));
    }
  }
  if (ls.size() < 3) throw ArgumentError("R/S: too few block sizes");
  const auto f = fit_line(ls, lrs);
  EstimatorResult r;
  r.method = EstimatorMethod::RS;
  r.d_hat = f.slope - 0.5;
  r.stderr_ = f.slope_se;
  r.diagnostics = {{"slope", f.slope},
                   {"n_blocks", static_cast<double>(ls.size())},
                   {"min_block", static_cast<double>(min_block)}};
  return r;
}

std::vector<double> periodogram(std::span<const double> x, std::size_t m) {
  const std::size_t n = x.size();
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  std::vector<double> I(m);
  for (std::size_t j = 1; j <= m; ++j) {
    const double lam = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double a = lam * static_cast<double>(t + 1);
      re += (x[t] - mean) * std::cos(a);
      im -= (x[t] - mean) * std::sin(a);
    }
    I[j - 1] = (re * re + im * im) / (2.0 * std::numbers::pi * static_cast<double>(n));
  }
  return I;
}

EstimatorResult estimate_gph(std::span<const double> x, std::optional<std::size_t> bandwidth) {
  check_series(x, 64, "GPH");
  const std::size_t n = x.size();
  const std::size_t m =
      bandwidth.value_or(static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n)))));
  if (m < 4) throw ArgumentError("GPH: bandwidth must be >= 4");
  if (m >= n / 2) throw ArgumentError("GPH: bandwidth must be below n/2");
  const auto I = periodogram(x, m);
  const double top = *std::max_element(I.begin(), I.end());
  const double floor = std::max(top * 1e-300, std::numeric_limits<double>::min());
  std::vector<double> reg(m), ly(m);
  for (std::size_t j = 1; j <= m; ++j) {
    const double lam = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    const double s = std::sin(0.5 * lam);
    reg[j - 1] = -std::log(4.0 * s * s);
    ly[j - 1] = std::log(std::max(I[j - 1], floor));
  }
  const auto f = fit_line(reg, ly);
  EstimatorResult r;
  r.method = EstimatorMethod::GPH;
  r.d_hat = f.slope;
  r.stderr_ = f.slope_se;
  r.diagnostics = {{"bandwidth", static_cast<double>(m)}, {"intercept", f.intercept}};
  return r;
}

EstimatorResult estimate_dfa(std::span<const double> x, const DfaOptions& opt) {
  check_series(x, 128, "DFA");
  if (opt.order < 0) throw ArgumentError("DFA: order must be >= 0");
  const std::size_t n = x.size();
  const std::size_t smin = std::max(opt.min_scale, static_cast<std::size_t>(opt.order) + 3);
  const std::size_t smax = opt.max_scale > 0 ? std::min(opt.max_scale, n) : n / 4;
  std::vector<std::size_t> scales;
  if (smax > smin && opt.n_scales >= 2) {
    const double l0 = std::log(static_cast<double>(smin)), l1 = std::log(static_cast<double>(smax));
    for (std::size_t i = 0; i < opt.n_scales; ++i) {
      const double l = l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(opt.n_scales - 1);
      const auto s = static_cast<std::size_t>(std::lround(std::exp(l)));
      if (scales.empty() || s != scales.back()) scales.push_back(s);
    }
  }
  if (scales.size() < 8) throw ArgumentError("DFA: fewer than 8 distinct scales");

  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  std::vector<double> profile(n);
  double cum = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    cum += x[t] - mean;
    profile[t] = cum;
  }
  std::vector<double> ls, lf;
  for (std::size_t s : scales) {
    const double f2 = kernels::omp::dfa_fluctuation_sq(profile, s, opt.order);
    if (!(f2 > 0.0)) throw DataError("DFA: zero fluctuation at some scale");
    ls.push_back(std::log(static_cast<double>(s)));
    lf.push_back(0.5 * std::log(f2));
  }
  const auto f = fit_line(ls, lf);
  EstimatorResult r;
  r.method = EstimatorMethod::DFA;
  r.d_hat = f.slope - 0.5;
  r.stderr_ = f.slope_se;
  r.diagnostics = {{"slope", f.slope},
                   {"n_scales", static_cast<double>(scales.size())},
                   {"min_scale", static_cast<double>(scales.front())},
                   {"max_scale", static_cast<double>(scales.back())},
                   {"order", static_cast<double>(opt.order)}};
  return r;
}

}  // namespace arfima
