#include "arfima/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "arfima/errors.hpp"
#include "arfima/fft_convolve.hpp"
#include "arfima/rjmcmc.hpp"

namespace arfima {

double quantile(std::span<const double> draws, double prob) {
  if (draws.empty()) throw ArgumentError("quantile: no draws");
  std::vector<double> v(draws.begin(), draws.end());
  std::sort(v.begin(), v.end());
  const double h = prob * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double effective_sample_size(std::span<const double> draws) {
  const std::size_t n = draws.size();
  if (n < 4) return static_cast<double>(n);
  const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / static_cast<double>(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = draws[i] - mean;
  std::vector<double> rev(y.rbegin(), y.rend());
  const auto conv = fft_linear_convolve(y, rev);
  const double c0 = conv[n - 1];
  if (!(c0 > 1e-300 * static_cast<double>(n))) return static_cast<double>(n);
  auto rho = [&](std::size_t k) { return conv[n - 1 + k] / c0; };
  // Sum consecutive pairs while they stay positive.
  double tau = -1.0;
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    const double g = rho(2 * m) + rho(2 * m + 1);
    if (!(g > 0.0)) break;
    tau += 2.0 * g;
  }
  tau = std::max(tau, 1.0 / static_cast<double>(n));
  return std::min(static_cast<double>(n), static_cast<double>(n) / tau);
}

ParamSummary summarize(std::span<const double> draws) {
  if (draws.size() < 100) throw ArgumentError("summarize: need at least 100 draws");
  ParamSummary s;
  s.draws = draws.size();
  const double n = static_cast<double>(draws.size());
  s.mean = std::accumulate(draws.begin(), draws.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : draws) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / (n - 1.0));
  std::vector<double> v(draws.begin(), draws.end());
  std::sort(v.begin(), v.end());
  s.ci_lo = quantile(v, 0.025);
  s.ci_hi = quantile(v, 0.975);
  s.ess = effective_sample_size(draws);
  return s;
}

double split_rhat(const std::vector<std::vector<double>>& chains) {
  if (chains.empty()) throw ArgumentError("split_rhat: no chains");
  const std::size_t len = chains[0].size();
  for (const auto& c : chains) {
    if (c.size() != len) throw ArgumentError("split_rhat: chains differ in length");
  }
  const std::size_t half = len / 2;
  if (half < 2) throw ArgumentError("split_rhat: chains too short");
  std::vector<double> means, vars;
  for (const auto& c : chains) {
    for (int h = 0; h < 2; ++h) {
      const auto first = c.begin() + static_cast<long>(h * half);
      const double m = std::accumulate(first, first + static_cast<long>(half), 0.0) /
                       static_cast<double>(half);
      double ss = 0.0;
      for (auto it = first; it != first + static_cast<long>(half); ++it) ss += (*it - m) * (*it - m);
      means.push_back(m);
      vars.push_back(ss / static_cast<double>(half - 1));
    }
  }
  const double k = static_cast<double>(means.size()), nn = static_cast<double>(half);
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / k;
  double B = 0.0;
  for (double m : means) B += (m - grand) * (m - grand);
  B *= nn / (k - 1.0);
  const double W = std::accumulate(vars.begin(), vars.end(), 0.0) / k;
  if (!(W > 0.0)) return 1.0;
  const double var_plus = (nn - 1.0) / nn * W + B / nn;
  return std::sqrt(var_plus / W);
}

PosteriorSummary summarize_samples(const SampleMatrix& samples,
                                   const std::vector<std::string>& columns,
                                   const std::map<std::string, double>& acceptance) {
  PosteriorSummary out;
  for (const auto& c : columns) out.params[c] = summarize(samples.column(c));
  out.acceptance = acceptance;
  return out;
}

std::pair<std::size_t, std::size_t> ModelProbTable::mode() const {
  Eigen::Index r = 0, c = 0;
  prob.maxCoeff(&r, &c);
  return {static_cast<std::size_t>(r), static_cast<std::size_t>(c)};
}

ModelProbTable model_table(const SampleMatrix& samples, std::size_t p_max, std::size_t q_max) {
  const auto p = samples.column("p");
  const auto q = samples.column("q");
  ModelProbTable t;
  t.prob = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p_max + 1),
                                 static_cast<Eigen::Index>(q_max + 1));
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto pi = static_cast<std::size_t>(p[i]), qi = static_cast<std::size_t>(q[i]);
    if (pi > p_max || qi > q_max) throw ArgumentError("model_table: model outside the grid");
    t.prob(static_cast<Eigen::Index>(pi), static_cast<Eigen::Index>(qi)) += 1.0;
  }
  if (!p.empty()) t.prob /= static_cast<double>(p.size());
  t.p_marginal = t.prob.rowwise().sum();
  t.q_marginal = t.prob.colwise().sum().transpose();
  return t;
}

double model_table_tv(const ModelProbTable& table, double lambda) {
  ModelPrior prior{lambda, static_cast<std::size_t>(table.prob.rows() - 1),
                   static_cast<std::size_t>(table.prob.cols() - 1)};
  double tv = 0.0;
  for (Eigen::Index i = 0; i < table.prob.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.prob.cols(); ++j) {
      const double m = std::exp(model_prior_logmass(
          {static_cast<std::size_t>(i), static_cast<std::size_t>(j)}, prior));
      tv += std::abs(table.prob(i, j) - m);
    }
  }
  return 0.5 * tv;
}

}  // namespace arfima
