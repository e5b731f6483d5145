#pragma once

#include <Eigen/Dense>
#include <cstddef>

#include "arfima/rng.hpp"

namespace arfima {

double normal_cdf(double x);
double normal_quantile(double p);

/// Rejection cap shared by the univariate and hypercuboid samplers.
inline constexpr std::size_t kMaxRejectionTrials = 1'000'000;

struct TruncNormalDraw {
  double value = 0.0;
  std::size_t trials = 0;
};

/// N(mean, sd^2) restricted to (a, b), by plain rejection.
TruncNormalDraw sample_trunc_normal(double mean, double sd, double a, double b, Rng& rng);

/// log [Phi((b - mean)/sd) - Phi((a - mean)/sd)]
double log_trunc_normal_mass(double mean, double sd, double a, double b);

struct TruncMvnDraw {
  Eigen::VectorXd value;
  std::size_t trials = 0;
};

/// N_r(mean, L L') restricted to the box (lower, upper), by rejection.
/// `chol` is the lower Cholesky factor.
TruncMvnDraw sample_trunc_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol,
                              const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                              Rng& rng);

/// P(lower < X < upper) for X ~ N_r(mean, cov); infinite bounds allowed.
///
/// The covariance is split into independent blocks (connected components of
/// its non-zero pattern). Scalar blocks are closed-form; larger blocks use
/// the separation-of-variables transform with tensor Gauss-Legendre nodes
/// (r <= 3) or a fixed Richtmyer lattice (r > 3), so the result is a
/// deterministic function of its arguments.
double mvn_box_probability(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                           const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

}  // namespace arfima
