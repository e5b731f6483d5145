#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arfima/estimators.hpp"
#include "arfima/samplers.hpp"

namespace arfima {

struct ParamSummary {
  double mean = 0.0;
  double sd = 0.0;
  double ci_lo = 0.0;  ///< 2.5% quantile
  double ci_hi = 0.0;  ///< 97.5% quantile
  double ess = 0.0;
  std::size_t draws = 0;
};

/// Needs at least 100 draws. Quantiles interpolate linearly between order
/// statistics.
ParamSummary summarize(std::span<const double> draws);

double quantile(std::span<const double> draws, double prob);

/// Effective sample size by Geyer's initial positive sequence.
double effective_sample_size(std::span<const double> draws);

/// Split-chain potential scale reduction over equal-length chains.
double split_rhat(const std::vector<std::vector<double>>& chains);

struct PosteriorSummary {
  std::map<std::string, ParamSummary> params;
  std::map<std::string, double> acceptance;
};

PosteriorSummary summarize_samples(const SampleMatrix& samples,
                                   const std::vector<std::string>& columns,
                                   const std::map<std::string, double>& acceptance = {});

struct ModelProbTable {
  Eigen::MatrixXd prob;  ///< (p_max+1) x (q_max+1)
  Eigen::VectorXd p_marginal;
  Eigen::VectorXd q_marginal;

  std::pair<std::size_t, std::size_t> mode() const;
};

/// Visit frequencies of (p, q) from the "p" and "q" columns.
ModelProbTable model_table(const SampleMatrix& samples, std::size_t p_max, std::size_t q_max);

/// Total variation distance between the table and the truncated Poisson
/// model prior on the same grid.
double model_table_tv(const ModelProbTable& table, double lambda);

struct StudyConfig {
  std::vector<std::size_t> n_grid{1024};
  std::vector<double> d_grid{0.0};
  std::size_t replicates = 20;  ///< per (n, d) cell
  double mu = 0.0;
  double sigma = 1.0;
  ChainConfig chain;
  PriorSpec prior;
  TuningSpec tuning;
  std::uint64_t seed = 1;
  bool estimators = false;

  void validate() const;
};

struct ReplicateResult {
  std::size_t n = 0;
  double d_true = 0.0;
  std::size_t rep = 0;
  ParamSummary d, mu, sigma;
  bool covered = false;
  std::map<std::string, double> acceptance;
  std::map<std::string, double> estimates;  ///< method -> d_hat
  std::string error;                        ///< empty on success
};

struct CellSummary {
  std::size_t n = 0;
  double d_true = 0.0;
  std::size_t count = 0;
  double mean_d = 0.0;
  double mean_residual = 0.0;
  double sd_residual = 0.0;
  double mean_sd_d = 0.0;
  double mean_sd_mu = 0.0;
  double mean_ci_lo = 0.0;  ///< averaged CI endpoints
  double mean_ci_hi = 0.0;
  double coverage = 0.0;
  std::map<std::string, double> estimator_bias;
  std::map<std::string, double> estimator_sd;
};

struct StudyReport {
  std::vector<ReplicateResult> replicates;
  std::vector<CellSummary> cells;
  /// log(mean posterior sd of d) on log n, averaged over the d grid.
  std::optional<LineFit> sd_d_vs_log_n;
  /// Per n: log(mean posterior sd of mu) on d_I.
  std::map<std::size_t, LineFit> log_sd_mu_vs_d;
};

/// Simulate FI(d) replicates over the (n, d) grid, fit each, and aggregate.
/// Replicates run in parallel; each has its own data and chain streams.
StudyReport mc_study(const StudyConfig& config);

std::vector<CellSummary> aggregate_cells(const std::vector<ReplicateResult>& reps);

}  // namespace arfima
