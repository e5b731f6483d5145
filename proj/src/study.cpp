#include <cmath>
#include <exception>
#include <map>

#include "arfima/diagnostics.hpp"
#include "arfima/errors.hpp"
#include "arfima/simulate.hpp"

namespace arfima {

void StudyConfig::validate() const {
  if (n_grid.empty() || d_grid.empty()) throw ConfigError("study: empty n or d grid");
  if (replicates * n_grid.size() * d_grid.size() < 10) {
    throw ConfigError("study: need at least 10 replicates in total");
  }
  for (double d : d_grid) {
    if (!(std::abs(d) < 0.5)) throw ConfigError("study: d values must lie in (-1/2, 1/2)");
  }
  for (std::size_t n : n_grid) {
    if (n < 16) throw ConfigError("study: series length must be >= 16");
  }
  if (!(sigma > 0.0)) throw ConfigError("study: sigma must be positive");
  if (chain.model.p != 0 || chain.model.q != 0) {
    throw ConfigError("study: replicates are FI(d); the fitted model must be (0,0)");
  }
  chain.validate();
  prior.validate();
  tuning.validate();
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

ReplicateResult run_replicate(const StudyConfig& cfg, std::size_t n, double d, std::size_t rep,
                              std::size_t index) {
  ReplicateResult r;
  r.n = n;
  r.d_true = d;
  r.rep = rep;
  try {
    const auto x = simulate_fid_exact(n, d, cfg.mu, cfg.sigma,
                                      derive_seed(cfg.seed, "replicate-data", index));
    ChainConfig cc = cfg.chain;
    cc.seed = derive_seed(cfg.seed, "replicate-chain", index);
    cc.chain_index = 0;
    const auto res = run_chain(x, cc, cfg.prior, cfg.tuning);
    r.d = summarize(res.samples.column("d"));
    r.mu = summarize(res.samples.column("mu"));
    r.sigma = summarize(res.samples.column("sigma"));
    r.covered = r.d.ci_lo <= d && d <= r.d.ci_hi;
    r.acceptance = res.acceptance;
    if (cfg.estimators) {
      auto add = [&](const char* name, auto&& fn) {
        try {
          r.estimates[name] = fn().d_hat;
        } catch (const std::exception&) {
          // A failing comparator leaves its entry absent.
        }
      };
      add("RS", [&] { return estimate_rs(x); });
      add("GPH", [&] { return estimate_gph(x); });
      add("DFA", [&] { return estimate_dfa(x); });
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

}  // namespace

std::vector<CellSummary> aggregate_cells(const std::vector<ReplicateResult>& reps) {
  std::map<std::pair<std::size_t, double>, std::vector<const ReplicateResult*>> groups;
  std::vector<std::pair<std::size_t, double>> order;
  for (const auto& r : reps) {
    const auto key = std::make_pair(r.n, r.d_true);
    if (!groups.count(key)) order.push_back(key);
    if (r.error.empty()) groups[key].push_back(&r);
    else groups[key];
  }
  std::vector<CellSummary> out;
  for (const auto& key : order) {
    const auto& g = groups[key];
    CellSummary c;
    c.n = key.first;
    c.d_true = key.second;
    c.count = g.size();
    if (g.empty()) {
      out.push_back(c);
      continue;
    }
    std::vector<double> dm, res, sdd, sdm, lo, hi;
    std::size_t cov = 0;
    std::map<std::string, std::vector<double>> est;
    for (const auto* r : g) {
      dm.push_back(r->d.mean);
      res.push_back(r->d.mean - r->d_true);
      sdd.push_back(r->d.sd);
      sdm.push_back(r->mu.sd);
      lo.push_back(r->d.ci_lo);
      hi.push_back(r->d.ci_hi);
      cov += r->covered ? 1 : 0;
      for (const auto& [k, v] : r->estimates) est[k].push_back(v - r->d_true);
    }
    c.mean_d = mean_of(dm);
    c.mean_residual = mean_of(res);
    c.sd_residual = sd_of(res);
    c.mean_sd_d = mean_of(sdd);
    c.mean_sd_mu = mean_of(sdm);
    c.mean_ci_lo = mean_of(lo);
    c.mean_ci_hi = mean_of(hi);
    c.coverage = static_cast<double>(cov) / static_cast<double>(g.size());
    for (const auto& [k, v] : est) {
      c.estimator_bias[k] = mean_of(v);
      c.estimator_sd[k] = sd_of(v);
    }
    out.push_back(c);
  }
  return out;
}

StudyReport mc_study(const StudyConfig& config) {
  config.validate();
  struct Job {
    std::size_t n;
    double d;
    std::size_t rep;
  };
  std::vector<Job> jobs;
  for (std::size_t n : config.n_grid) {
    for (double d : config.d_grid) {
      for (std::size_t r = 0; r < config.replicates; ++r) jobs.push_back({n, d, r});
    }
  }
  StudyReport report;
  report.replicates.resize(jobs.size());
  const long njobs = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < njobs; ++i) {
    const auto& j = jobs[static_cast<std::size_t>(i)];
    report.replicates[static_cast<std::size_t>(i)] =
        run_replicate(config, j.n, j.d, j.rep, static_cast<std::size_t>(i));
  }
  report.cells = aggregate_cells(report.replicates);

  // Scaling regressions over cell means.
  std::map<std::size_t, std::vector<double>> sd_by_n;
  std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> mu_by_n;
  for (const auto& c : report.cells) {
    if (c.count == 0) continue;
    sd_by_n[c.n].push_back(c.mean_sd_d);
    mu_by_n[c.n].first.push_back(c.d_true);
    mu_by_n[c.n].second.push_back(std::log(c.mean_sd_mu));
  }
  if (sd_by_n.size() >= 2) {
    std::vector<double> ln, ls;
    for (const auto& [n, v] : sd_by_n) {
      ln.push_back(std::log(static_cast<double>(n)));
      ls.push_back(std::log(mean_of(v)));
    }
    report.sd_d_vs_log_n = fit_line(ln, ls);
  }
  for (const auto& [n, xy] : mu_by_n) {
    if (xy.first.size() >= 2) report.log_sd_mu_vs_d[n] = fit_line(xy.first, xy.second);
  }
  return report;
}

}  // namespace arfima
