#include "arfima/truncated_normal.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "arfima/errors.hpp"

namespace arfima {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

TruncNormalDraw sample_trunc_normal(double mean, double sd, double a, double b, Rng& rng) {
  if (!(a < b)) throw ArgumentError("sample_trunc_normal: need a < b");
  if (!(sd > 0.0)) throw ArgumentError("sample_trunc_normal: need sd > 0");
  for (std::size_t t = 1; t <= kMaxRejectionTrials; ++t) {
    const double v = rng.normal(mean, sd);
    if (v > a && v < b) return {v, t};
  }
  throw NumericalError("sample_trunc_normal: rejection cap exceeded");
}

double log_trunc_normal_mass(double mean, double sd, double a, double b) {
  const double za = (a - mean) / sd, zb = (b - mean) / sd;
  // Work in the tail that keeps precision.
  if (za > 0.0) return std::log(normal_cdf(-za) - normal_cdf(-zb));
  return std::log(normal_cdf(zb) - normal_cdf(za));
}

TruncMvnDraw sample_trunc_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol,
                              const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                              Rng& rng) {
  const Eigen::Index r = mean.size();
  if (chol.rows() != r || chol.cols() != r || lower.size() != r || upper.size() != r) {
    throw ArgumentError("sample_trunc_mvn: dimension mismatch");
  }
  Eigen::VectorXd z(r);
  for (std::size_t t = 1; t <= kMaxRejectionTrials; ++t) {
    for (Eigen::Index i = 0; i < r; ++i) z[i] = rng.normal();
    Eigen::VectorXd v = mean + chol.triangularView<Eigen::Lower>() * z;
    if (((v.array() > lower.array()) && (v.array() < upper.array())).all()) {
      return {std::move(v), t};
    }
  }
  throw NumericalError("sample_trunc_mvn: rejection cap exceeded");
}

namespace {

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on (0, 1).
Quadrature gauss_legendre(int m) {
  Quadrature q;
  q.nodes.resize(m);
  q.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
    }
    q.nodes[i] = 0.5 * (1.0 - x);
    q.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);  // (2 / ((1-x^2) dp^2)) / 2
  }
  return q;
}

const Quadrature& gl_rule(int m) {
  static const Quadrature q64 = gauss_legendre(64);
  static const Quadrature q32 = gauss_legendre(32);
  return m == 64 ? q64 : q32;
}

// Separation-of-variables integrand for one point w in (0,1)^{r-1}.
double sov_integrand(const Eigen::MatrixXd& L, const Eigen::VectorXd& a,
                     const Eigen::VectorXd& b, const double* w, std::vector<double>& y) {
  const Eigen::Index r = L.rows();
  double d = normal_cdf(a[0] / L(0, 0));
  double e = normal_cdf(b[0] / L(0, 0));
  double f = e - d;
  for (Eigen::Index i = 1; i < r && f > 0.0; ++i) {
    const double u = std::clamp(d + w[i - 1] * (e - d), 1e-300, 1.0 - 1e-16);
    y[i - 1] = normal_quantile(u);
    double s = 0.0;
    for (Eigen::Index j = 0; j < i; ++j) s += L(i, j) * y[j];
    d = normal_cdf((a[i] - s) / L(i, i));
    e = normal_cdf((b[i] - s) / L(i, i));
    f *= (e - d);
  }
  return f;
}

double block_probability(const Eigen::MatrixXd& cov, const Eigen::VectorXd& a,
                         const Eigen::VectorXd& b) {
  const Eigen::Index r = cov.rows();
  if (r == 1) {
    const double s = std::sqrt(cov(0, 0));
    return normal_cdf(b[0] / s) - normal_cdf(a[0] / s);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("mvn_box_probability: covariance is not positive definite");
  }
  const Eigen::MatrixXd L = llt.matrixL();
  std::vector<double> y(r), w(r);
  double total = 0.0;
  if (r == 2) {
    const auto& q = gl_rule(64);
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      w[0] = q.nodes[i];
      total += q.weights[i] * sov_integrand(L, a, b, w.data(), y);
    }
  } else if (r == 3) {
    const auto& q = gl_rule(32);
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      for (std::size_t j = 0; j < q.nodes.size(); ++j) {
        w[0] = q.nodes[i];
        w[1] = q.nodes[j];
        total += q.weights[i] * q.weights[j] * sov_integrand(L, a, b, w.data(), y);
      }
    }
  } else {
    // Richtmyer lattice with square-root-of-prime generators and a
    // periodising baker transform; fixed shift keeps it deterministic.
    static constexpr double primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41,
                                        43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
    if (r - 1 > static_cast<Eigen::Index>(std::size(primes))) {
      throw ArgumentError("mvn_box_probability: block dimension too large");
    }
    const std::size_t npts = 1u << 14;
    for (std::size_t k = 1; k <= npts; ++k) {
      for (Eigen::Index i = 0; i + 1 < r; ++i) {
        double u = std::fmod(static_cast<double>(k) * std::sqrt(primes[i]) + 0.5, 1.0);
        w[i] = 1.0 - std::abs(2.0 * u - 1.0);
      }
      total += sov_integrand(L, a, b, w.data(), y);
    }
    total /= static_cast<double>(npts);
  }
  return total;
}

}  // namespace

double mvn_box_probability(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                           const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  const Eigen::Index r = mean.size();
  if (cov.rows() != r || cov.cols() != r || lower.size() != r || upper.size() != r) {
    throw ArgumentError("mvn_box_probability: dimension mismatch");
  }
  // Union-find over the non-zero pattern.
  std::vector<Eigen::Index> parent(r);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = i + 1; j < r; ++j) {
      if (cov(i, j) != 0.0 || cov(j, i) != 0.0) parent[find(i)] = find(j);
    }
  }
  double prob = 1.0;
  for (Eigen::Index root = 0; root < r; ++root) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < r; ++i) {
      if (find(i) == root) idx.push_back(i);
    }
    if (idx.empty()) continue;
    const auto m = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd c(m, m);
    Eigen::VectorXd a(m), b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      a[i] = lower[idx[i]] - mean[idx[i]];
      b[i] = upper[idx[i]] - mean[idx[i]];
      for (Eigen::Index j = 0; j < m; ++j) c(i, j) = cov(idx[i], idx[j]);
    }
    prob *= block_probability(c, a, b);
  }
  return prob;
}

}  // namespace arfima
