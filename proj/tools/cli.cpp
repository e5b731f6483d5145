#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>

#include "arfima/diagnostics.hpp"
#include "arfima/errors.hpp"
#include "arfima/estimators.hpp"
#include "arfima/rjmcmc.hpp"
#include "arfima/samplers.hpp"
#include "arfima/simulate.hpp"

namespace arfima::cli {

namespace {

json priors_default() {
  return {{"mu", {{"kind", "flat"}, {"mu0", 0.0}, {"sigma0", 1.0}}},
          {"sigma", {{"kind", "diffuse"}, {"alpha0", 1.0}, {"beta0", 1.0}}}};
}

json tuning_default() {
  return {{"sigma_mu", 0.0},
          {"sigma_sigma", 0.1},
          {"sigma_d", 0.05},
          {"sigma_pacf", 0.1},
          {"xA_update_period", 0}};
}

json innovation_default() { return {{"family", "gaussian"}, {"df", nullptr}}; }

json kernels_default() { return {{"mu", "auto"}, {"sigma", "auto"}}; }

json fit_default() {
  return {{"input", nullptr},
          {"output", nullptr},
          {"samples", nullptr},
          {"seed", 1},
          {"iters", 6000},
          {"burnin", 1000},
          {"thin", 1},
          {"likelihood", "approx"},
          {"model", {0, 0}},
          {"truncation", 0},
          {"innovation", innovation_default()},
          {"priors", priors_default()},
          {"tuning", tuning_default()},
          {"kernels", kernels_default()},
          {"chains", 5},
          {"starts", {-0.4, -0.2, 0.0, 0.2, 0.4}},
          {"prior_only", false},
          {"pilot", {{"iters", 5000}, {"burnin", 1000}, {"sigma", 0.05}, {"model", {1, 1}}}},
          {"rj",
           {{"enabled", false},
            {"pmax", 5},
            {"qmax", 5},
            {"lambda", 1.0},
            {"sweeps_per_jump", 1}}}};
}

[[noreturn]] void config_fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& def, const json& user, const std::string& path) {
  if (!user.is_object()) config_fail("config" + path + " must be a JSON object");
  for (const auto& [k, v] : user.items()) {
    if (!def.contains(k)) config_fail("unknown config key '" + path + (path.empty() ? "" : ".") + k + "'");
    const auto& d = def.at(k);
    if (d.is_object()) check_keys(d, v, path + (path.empty() ? "" : ".") + k);
  }
}

template <class T>
T get(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    config_fail("config key '" + key + "' has the wrong type or is missing");
  }
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string require_path(const json& cfg, const char* key) {
  if (!cfg.contains(key) || cfg.at(key).is_null()) {
    config_fail(std::string("missing required '") + key + "' (use --" + key + ")");
  }
  return get<std::string>(cfg, key);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot open output file '" + path + "' for writing");
  return f;
}

void emit(const json& cfg, const json& doc, std::ostream* out) {
  if (cfg.contains("output") && !cfg.at("output").is_null()) {
    const auto path = get<std::string>(cfg, "output");
    auto f = open_out(path);
    f << doc.dump(2) << "\n";
    if (!f) throw DataError("failed writing '" + path + "'");
  } else if (out) {
    *out << doc.dump(2) << "\n";
  }
}

InnovationSpec innovation_from(const json& j, double sigma = 1.0) {
  InnovationSpec in;
  const auto fam = get<std::string>(j, "family");
  if (fam == "gaussian") {
    in.family = InnovationFamily::gaussian;
  } else if (fam == "student_t") {
    in.family = InnovationFamily::student_t;
    if (j.at("df").is_null()) config_fail("student_t innovations need 'df'");
    in.shape = {get<double>(j, "df")};
  } else {
    config_fail("innovation family must be 'gaussian' or 'student_t'");
  }
  in.sigma = sigma;
  try {
    in.validate();
  } catch (const std::exception& e) {
    config_fail(e.what());
  }
  return in;
}

PriorSpec priors_from(const json& j) {
  PriorSpec p;
  const auto& m = j.at("mu");
  const auto mk = get<std::string>(m, "kind");
  if (mk == "flat") p.mu.kind = MuPrior::Kind::flat;
  else if (mk == "gaussian") p.mu.kind = MuPrior::Kind::gaussian;
  else config_fail("priors.mu.kind must be 'flat' or 'gaussian'");
  p.mu.mu0 = get<double>(m, "mu0");
  p.mu.sigma0 = get<double>(m, "sigma0");
  const auto& s = j.at("sigma");
  const auto sk = get<std::string>(s, "kind");
  if (sk == "diffuse") p.sigma.kind = SigmaPrior::Kind::diffuse;
  else if (sk == "root_inverse_gamma") p.sigma.kind = SigmaPrior::Kind::root_inverse_gamma;
  else config_fail("priors.sigma.kind must be 'diffuse' or 'root_inverse_gamma'");
  p.sigma.alpha0 = get<double>(s, "alpha0");
  p.sigma.beta0 = get<double>(s, "beta0");
  p.validate();
  return p;
}

TuningSpec tuning_from(const json& j) {
  TuningSpec t;
  t.sigma_mu = get<double>(j, "sigma_mu");
  t.sigma_sigma = get<double>(j, "sigma_sigma");
  t.sigma_d = get<double>(j, "sigma_d");
  t.sigma_pacf = get<double>(j, "sigma_pacf");
  t.xA_update_period = get<std::size_t>(j, "xA_update_period");
  t.validate();
  return t;
}

KernelChoice kernel_from(const std::string& s) {
  if (s == "auto") return KernelChoice::automatic;
  if (s == "gibbs") return KernelChoice::gibbs;
  if (s == "mh") return KernelChoice::mh;
  config_fail("kernel choice must be 'auto', 'gibbs' or 'mh'");
}

LikelihoodMode mode_from(const std::string& s) {
  if (s == "approx" || s == "approximate") return LikelihoodMode::approximate;
  if (s == "exact") return LikelihoodMode::exact;
  config_fail("likelihood must be 'exact' or 'approx'");
}

ModelIndex model_from(const json& j) {
  if (!j.is_array() || j.size() != 2) config_fail("model must be [p, q]");
  try {
    return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
  } catch (const json::exception&) {
    config_fail("model must be two non-negative integers");
  }
}

ChainConfig chain_from(const json& cfg) {
  ChainConfig c;
  c.model = model_from(cfg.at("model"));
  c.mode = mode_from(get<std::string>(cfg, "likelihood"));
  c.truncation = get<std::size_t>(cfg, "truncation");
  c.innovation = innovation_from(cfg.at("innovation"));
  c.mu_kernel = kernel_from(get<std::string>(cfg.at("kernels"), "mu"));
  c.sigma_kernel = kernel_from(get<std::string>(cfg.at("kernels"), "sigma"));
  c.iters = get<std::size_t>(cfg, "iters");
  c.burnin = get<std::size_t>(cfg, "burnin");
  c.thin = get<std::size_t>(cfg, "thin");
  c.seed = get<std::uint64_t>(cfg, "seed");
  if (cfg.contains("prior_only")) c.prior_only = get<bool>(cfg, "prior_only");
  c.validate();
  return c;
}

json summary_json(const ParamSummary& s) {
  return {{"mean", s.mean}, {"sd", s.sd}, {"ci95", {s.ci_lo, s.ci_hi}}, {"ess", s.ess}};
}

// Run `chains` jobs in parallel, keeping results in chain order.
template <class Result, class Fn>
std::vector<Result> run_parallel(std::size_t chains, Fn&& fn) {
  std::vector<Result> out(chains);
  std::vector<std::exception_ptr> errs(chains);
  const long nc = static_cast<long>(chains);
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < nc; ++k) {
    try {
      out[static_cast<std::size_t>(k)] = fn(static_cast<std::size_t>(k));
    } catch (...) {
      errs[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (auto& e : errs) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// Stack per-chain draws and append a chain column.
SampleMatrix pool(const std::vector<const SampleMatrix*>& parts) {
  SampleMatrix all;
  all.columns = parts.front()->columns;
  all.columns.push_back("chain");
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto* m = parts[k];
    for (std::size_t r = 0; r < m->rows(); ++r) {
      std::vector<double> row(m->data.begin() + static_cast<long>(r * m->columns.size()),
                              m->data.begin() + static_cast<long>((r + 1) * m->columns.size()));
      row.push_back(static_cast<double>(k));
      all.push_row(row);
    }
  }
  return all;
}

json pooled_posterior(const std::vector<const SampleMatrix*>& parts,
                      const std::vector<std::string>& cols, json& ess, json& rhat) {
  json post = json::object();
  for (const auto& c : cols) {
    std::vector<double> all;
    std::vector<std::vector<double>> per;
    double ess_sum = 0.0;
    for (const auto* m : parts) {
      auto v = m->column(c);
      std::vector<double> finite;
      for (double x : v) {
        if (!std::isnan(x)) finite.push_back(x);
      }
      if (finite.size() >= 4) ess_sum += effective_sample_size(finite);
      all.insert(all.end(), finite.begin(), finite.end());
      per.push_back(std::move(v));
    }
    if (all.size() < 100) continue;
    auto s = summarize(all);
    s.ess = ess_sum;
    post[c] = summary_json(s);
    ess[c] = ess_sum;
    bool complete = true;
    for (const auto& v : per) {
      complete = complete && std::none_of(v.begin(), v.end(), [](double x) { return std::isnan(x); });
    }
    if (complete && per.front().size() >= 4) rhat[c] = split_rhat(per);
  }
  return post;
}

json mean_acceptance(const std::vector<std::map<std::string, double>>& per) {
  std::map<std::string, std::pair<double, int>> acc;
  for (const auto& m : per) {
    for (const auto& [k, v] : m) {
      acc[k].first += v;
      acc[k].second += 1;
    }
  }
  json out = json::object();
  for (const auto& [k, v] : acc) out[k] = v.first / v.second;
  return out;
}

void write_samples(const std::string& path, const SampleMatrix& m) {
  auto f = open_out(path);
  for (std::size_t j = 0; j < m.columns.size(); ++j) f << (j ? "," : "") << m.columns[j];
  f << "\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t j = 0; j < m.columns.size(); ++j) {
      const double v = m.at(r, j);
      const auto& name = m.columns[j];
      const bool integral = name == "iter" || name == "p" || name == "q" || name == "chain";
      f << (j ? "," : "") << (integral && !std::isnan(v) ? std::to_string(static_cast<long long>(v)) : fmt(v));
    }
    f << "\n";
  }
  if (!f) throw DataError("failed writing '" + path + "'");
}

json envelope(const std::string& command, const json& cfg) {
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"version", kVersion},
          {"seed", cfg.at("seed")},
          {"config", cfg}};
}

std::vector<double> starts_from(const json& cfg) {
  auto s = get<std::vector<double>>(cfg, "starts");
  if (s.empty()) config_fail("starts must be non-empty");
  for (double d : s) {
    if (!(std::abs(d) < 0.5)) config_fail("starts must lie in (-1/2, 1/2)");
  }
  return s;
}

}  // namespace

json default_config(const std::string& command) {
  if (command == "simulate") {
    return {{"output", nullptr},
            {"seed", 1},
            {"n", 1024},
            {"d", 0.0},
            {"phi", json::array()},
            {"theta", json::array()},
            {"mu", 0.0},
            {"sigma", 1.0},
            {"innovation", innovation_default()},
            {"burnin", nullptr},
            {"header", false}};
  }
  if (command == "fit" || command == "rjfit") {
    auto c = fit_default();
    if (command == "rjfit") c["rj"]["enabled"] = true;
    return c;
  }
  if (command == "estimate") {
    return {{"input", nullptr}, {"output", nullptr}, {"seed", 1},
            {"gph_bandwidth", nullptr}, {"dfa_order", 1}, {"rs_min_block", 16}};
  }
  if (command == "mcstudy") {
    return {{"output", nullptr},
            {"replicates_csv", nullptr},
            {"seed", 1},
            {"n_grid", {1024}},
            {"d_grid", {0.0}},
            {"replicates", 20},
            {"mu", 0.0},
            {"sigma", 1.0},
            {"iters", 6000},
            {"burnin", 1000},
            {"thin", 1},
            {"likelihood", "approx"},
            {"truncation", 0},
            {"estimators", true},
            {"priors", priors_default()},
            {"tuning", tuning_default()},
            {"kernels", kernels_default()}};
  }
  config_fail("unknown command '" + command + "'");
}

namespace {

// Like merge_patch, except that null is a value (e.g. "no output file")
// rather than a deletion.
void overlay(json& base, const json& user) {
  for (const auto& [k, v] : user.items()) {
    if (v.is_object() && base.contains(k) && base.at(k).is_object()) {
      overlay(base[k], v);
    } else {
      base[k] = v;
    }
  }
}

}  // namespace

json resolve_config(const std::string& command, const json& user_in) {
  json def = default_config(command);
  json user = user_in;
  if (user.is_object() && user.contains("schema_version") && user.contains("config")) {
    user = user.at("config");
  }
  if (user.is_null()) return def;
  check_keys(def, user, "");
  overlay(def, user);
  return def;
}

std::vector<double> read_series_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open input file '" + path + "'");
  std::vector<double> x;
  std::string line;
  std::size_t lineno = 0, blank_run = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos) {
      ++blank_run;
      continue;
    }
    const auto e = line.find_last_not_of(" \t");
    const std::string tok = line.substr(b, e - b + 1);
    if (blank_run > 0 && !x.empty()) {
      throw DataError(path + ": missing value at line " + std::to_string(lineno - blank_run));
    }
    blank_run = 0;
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      if (x.empty() && lineno == 1) continue;  // header
      throw DataError(path + ": line " + std::to_string(lineno) + " is not a number: '" + tok + "'");
    }
    if (!std::isfinite(v)) {
      throw DataError(path + ": non-finite value at line " + std::to_string(lineno));
    }
    x.push_back(v);
  }
  if (x.empty()) throw DataError(path + ": no observations");
  return x;
}

void write_series_csv(const std::string& path, const std::vector<double>& x, bool header) {
  auto f = open_out(path);
  if (header) f << "x\n";
  for (double v : x) f << fmt(v) << "\n";
  if (!f) throw DataError("failed writing '" + path + "'");
}

json cmd_simulate(const json& cfg) {
  SimSpec spec;
  spec.n = get<std::size_t>(cfg, "n");
  spec.memory.d = get<double>(cfg, "d");
  spec.memory.phi = get<std::vector<double>>(cfg, "phi");
  spec.memory.theta = get<std::vector<double>>(cfg, "theta");
  spec.mu = get<double>(cfg, "mu");
  const double sigma = get<double>(cfg, "sigma");
  if (!(sigma > 0.0)) config_fail("simulate: sigma must be positive");
  spec.innovation = innovation_from(cfg.at("innovation"), sigma);
  spec.seed = get<std::uint64_t>(cfg, "seed");
  if (!cfg.at("burnin").is_null()) spec.burnin = get<std::size_t>(cfg, "burnin");
  const auto x = simulate_arfima(spec);
  json doc = envelope("simulate", cfg);
  doc["n"] = x.size();
  doc["series"] = x;
  return doc;
}

json cmd_rjfit(const json& cfg) {
  const auto x = read_series_csv(require_path(cfg, "input"));
  const ChainConfig base = chain_from(cfg);
  const PriorSpec prior = priors_from(cfg.at("priors"));
  const TuningSpec tuning = tuning_from(cfg.at("tuning"));
  const auto starts = starts_from(cfg);
  const auto chains = get<std::size_t>(cfg, "chains");
  if (chains == 0) config_fail("chains must be >= 1");
  const auto& rj = cfg.at("rj");

  RjConfig rc;
  rc.chain = base;
  rc.model_prior = {get<double>(rj, "lambda"), get<std::size_t>(rj, "pmax"),
                    get<std::size_t>(rj, "qmax")};
  rc.sweeps_per_jump = get<std::size_t>(rj, "sweeps_per_jump");
  const auto& pj = cfg.at("pilot");
  rc.pilot = {model_from(pj.at("model")), get<std::size_t>(pj, "iters"),
              get<std::size_t>(pj, "burnin"), get<double>(pj, "sigma")};
  std::optional<ReparamMemory> warm;
  if (!base.prior_only) {
    ReparamMemory end;
    rc.proposal = pilot_tune(x, rc.pilot, base, prior, &end);
    if (rc.pilot.model.p <= rc.model_prior.p_max && rc.pilot.model.q <= rc.model_prior.q_max) {
      warm = end;
    }
  }

  const auto results = run_parallel<RjResult>(chains, [&](std::size_t k) {
    RjConfig c = rc;
    c.chain.chain_index = k;
    c.chain.init_d = starts[k % starts.size()];
    if (warm) {
      // Pilot end state, with the chain's own starting d for dispersion.
      c.chain.model = rc.pilot.model;
      c.chain.init_memory = *warm;
      c.chain.init_memory->d = c.chain.init_d;
    }
    return run_rj_chain(x, c, prior, tuning);
  });

  std::vector<const SampleMatrix*> parts;
  std::vector<std::map<std::string, double>> acc;
  for (const auto& r : results) {
    parts.push_back(&r.samples);
    acc.push_back(r.acceptance);
  }
  const SampleMatrix all = pool(parts);
  const auto table = model_table(all, rc.model_prior.p_max, rc.model_prior.q_max);

  json doc = envelope("rjfit", cfg);
  json ess = json::object(), rhat = json::object();
  doc["posterior"] = pooled_posterior(parts, {"d", "mu", "sigma"}, ess, rhat);
  doc["acceptance"] = mean_acceptance(acc);
  doc["ess"] = ess;
  doc["rhat"] = rhat;
  doc["chains"] = chains;
  json rows = json::array();
  for (Eigen::Index i = 0; i < table.prob.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < table.prob.cols(); ++j) row.push_back(table.prob(i, j));
    rows.push_back(row);
  }
  const auto [mp, mq] = table.mode();
  doc["model_probabilities"] = {
      {"table", rows},
      {"p_marginal", std::vector<double>(table.p_marginal.data(),
                                         table.p_marginal.data() + table.p_marginal.size())},
      {"q_marginal", std::vector<double>(table.q_marginal.data(),
                                         table.q_marginal.data() + table.q_marginal.size())},
      {"mode", {mp, mq}},
      {"mode_probability", table.prob(static_cast<Eigen::Index>(mp), static_cast<Eigen::Index>(mq))}};
  const auto& pc = results.front().proposal;
  doc["proposal"] = {{"Sigma11",
                      {{pc.Sigma11(0, 0), pc.Sigma11(0, 1), pc.Sigma11(0, 2)},
                       {pc.Sigma11(1, 0), pc.Sigma11(1, 1), pc.Sigma11(1, 2)},
                       {pc.Sigma11(2, 0), pc.Sigma11(2, 1), pc.Sigma11(2, 2)}}},
                     {"sigma2_varphi", pc.sigma2_varphi},
                     {"sigma2_vartheta", pc.sigma2_vartheta}};
  if (!cfg.at("samples").is_null()) write_samples(get<std::string>(cfg, "samples"), all);
  return doc;
}

json cmd_fit(const json& cfg) {
  if (get<bool>(cfg.at("rj"), "enabled")) return cmd_rjfit(cfg);
  const auto x = read_series_csv(require_path(cfg, "input"));
  const ChainConfig base = chain_from(cfg);
  const PriorSpec prior = priors_from(cfg.at("priors"));
  TuningSpec tuning = tuning_from(cfg.at("tuning"));
  const auto starts = starts_from(cfg);
  const auto chains = get<std::size_t>(cfg, "chains");
  if (chains == 0) config_fail("chains must be >= 1");

  const auto m = base.model;
  if (m.p + m.q > 0 && !base.prior_only) {
    const auto& pj = cfg.at("pilot");
    PilotConfig pilot{model_from(pj.at("model")), get<std::size_t>(pj, "iters"),
                      get<std::size_t>(pj, "burnin"), get<double>(pj, "sigma")};
    pilot.model = {std::min(pilot.model.p, m.p), std::min(pilot.model.q, m.q)};
    tuning.Sigma_varpi = build_proposal_cov(m, pilot_tune(x, pilot, base, prior));
  }

  const auto results = run_parallel<ChainResult>(chains, [&](std::size_t k) {
    ChainConfig c = base;
    c.chain_index = k;
    c.init_d = starts[k % starts.size()];
    return run_chain(x, c, prior, tuning);
  });

  std::vector<const SampleMatrix*> parts;
  std::vector<std::map<std::string, double>> acc;
  for (const auto& r : results) {
    parts.push_back(&r.samples);
    acc.push_back(r.acceptance);
  }
  std::vector<std::string> cols{"d", "mu", "sigma"};
  for (std::size_t k = 1; k <= m.p; ++k) cols.push_back("varphi_" + std::to_string(k));
  for (std::size_t k = 1; k <= m.q; ++k) cols.push_back("vartheta_" + std::to_string(k));

  json doc = envelope("fit", cfg);
  json ess = json::object(), rhat = json::object();
  doc["posterior"] = pooled_posterior(parts, cols, ess, rhat);
  doc["acceptance"] = mean_acceptance(acc);
  doc["ess"] = ess;
  doc["rhat"] = rhat;
  doc["chains"] = chains;
  if (!cfg.at("samples").is_null()) write_samples(get<std::string>(cfg, "samples"), pool(parts));
  return doc;
}

json cmd_estimate(const json& cfg) {
  const auto x = read_series_csv(require_path(cfg, "input"));
  json doc = envelope("estimate", cfg);
  doc["n"] = x.size();
  json est = json::object();
  int failures = 0;
  std::string last_error;
  auto run = [&](const char* name, auto&& fn) {
    try {
      const EstimatorResult r = fn();
      json j = {{"d_hat", r.d_hat}, {"diagnostics", r.diagnostics}};
      j["stderr"] = r.stderr_ ? json(*r.stderr_) : json(nullptr);
      est[name] = j;
    } catch (const std::exception& e) {
      ++failures;
      last_error = e.what();
      est[name] = {{"error", e.what()}, {"exit_code", exit_code_for(e)}};
    }
  };
  run("RS", [&] { return estimate_rs(x, get<std::size_t>(cfg, "rs_min_block")); });
  run("GPH", [&] {
    std::optional<std::size_t> bw;
    if (!cfg.at("gph_bandwidth").is_null()) bw = get<std::size_t>(cfg, "gph_bandwidth");
    return estimate_gph(x, bw);
  });
  run("DFA", [&] {
    DfaOptions o;
    o.order = get<int>(cfg, "dfa_order");
    return estimate_dfa(x, o);
  });
  doc["estimates"] = est;
  doc["failures"] = failures;
  return doc;
}

json cmd_mcstudy(const json& cfg) {
  StudyConfig sc;
  sc.n_grid = get<std::vector<std::size_t>>(cfg, "n_grid");
  sc.d_grid = get<std::vector<double>>(cfg, "d_grid");
  sc.replicates = get<std::size_t>(cfg, "replicates");
  sc.mu = get<double>(cfg, "mu");
  sc.sigma = get<double>(cfg, "sigma");
  sc.seed = get<std::uint64_t>(cfg, "seed");
  sc.estimators = get<bool>(cfg, "estimators");
  sc.prior = priors_from(cfg.at("priors"));
  sc.tuning = tuning_from(cfg.at("tuning"));
  sc.chain.mode = mode_from(get<std::string>(cfg, "likelihood"));
  sc.chain.truncation = get<std::size_t>(cfg, "truncation");
  sc.chain.iters = get<std::size_t>(cfg, "iters");
  sc.chain.burnin = get<std::size_t>(cfg, "burnin");
  sc.chain.thin = get<std::size_t>(cfg, "thin");
  sc.chain.mu_kernel = kernel_from(get<std::string>(cfg.at("kernels"), "mu"));
  sc.chain.sigma_kernel = kernel_from(get<std::string>(cfg.at("kernels"), "sigma"));
  const auto report = mc_study(sc);

  json doc = envelope("mcstudy", cfg);
  json cells = json::array();
  std::size_t covered = 0, ok = 0;
  for (const auto& r : report.replicates) {
    if (r.error.empty()) {
      ++ok;
      covered += r.covered ? 1 : 0;
    }
  }
  for (const auto& c : report.cells) {
    cells.push_back({{"n", c.n},
                     {"d_true", c.d_true},
                     {"count", c.count},
                     {"mean_d", c.mean_d},
                     {"mean_residual", c.mean_residual},
                     {"sd_residual", c.sd_residual},
                     {"mean_sd_d", c.mean_sd_d},
                     {"mean_sd_mu", c.mean_sd_mu},
                     {"mean_ci95", {c.mean_ci_lo, c.mean_ci_hi}},
                     {"coverage", c.coverage},
                     {"estimator_bias", c.estimator_bias},
                     {"estimator_sd", c.estimator_sd}});
  }
  doc["cells"] = cells;
  doc["replicates_ok"] = ok;
  doc["replicates_failed"] = report.replicates.size() - ok;
  doc["coverage"] = ok ? static_cast<double>(covered) / static_cast<double>(ok) : 0.0;
  json slopes = json::object();
  if (report.sd_d_vs_log_n) {
    slopes["log_sd_d_vs_log_n"] = {{"slope", report.sd_d_vs_log_n->slope},
                                   {"se", report.sd_d_vs_log_n->slope_se}};
  }
  json mu_slopes = json::object();
  for (const auto& [n, f] : report.log_sd_mu_vs_d) {
    mu_slopes[std::to_string(n)] = {{"slope", f.slope}, {"se", f.slope_se},
                                    {"log_n", std::log(static_cast<double>(n))}};
  }
  slopes["log_sd_mu_vs_d"] = mu_slopes;
  doc["slopes"] = slopes;

  if (!cfg.at("replicates_csv").is_null()) {
    const auto path = get<std::string>(cfg, "replicates_csv");
    auto f = open_out(path);
    f << "n,d_true,rep,d_mean,d_sd,d_lo,d_hi,mu_mean,mu_sd,sigma_mean,covered,RS,GPH,DFA,error\n";
    for (const auto& r : report.replicates) {
      auto est = [&](const char* k) {
        const auto it = r.estimates.find(k);
        return it == r.estimates.end() ? std::string() : fmt(it->second);
      };
      std::string err = r.error;
      std::replace(err.begin(), err.end(), ',', ';');
      f << r.n << "," << fmt(r.d_true) << "," << r.rep << "," << fmt(r.d.mean) << ","
        << fmt(r.d.sd) << "," << fmt(r.d.ci_lo) << "," << fmt(r.d.ci_hi) << ","
        << fmt(r.mu.mean) << "," << fmt(r.mu.sd) << "," << fmt(r.sigma.mean) << ","
        << (r.covered ? 1 : 0) << "," << est("RS") << "," << est("GPH") << "," << est("DFA")
        << "," << err << "\n";
    }
    if (!f) throw DataError("failed writing '" + path + "'");
  }
  return doc;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericalError*>(&e)) return kNumerical;
  if (dynamic_cast<const DataError*>(&e)) return kData;
  if (dynamic_cast<const std::logic_error*>(&e)) return kConfig;  // argument, domain, config
  if (dynamic_cast<const json::exception*>(&e)) return kConfig;
  return kNumerical;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian inference for ARFIMA(p,d,q) long-memory processes"};
  app.require_subcommand(1);

  struct Flags {
    std::string input, output, config, likelihood, model, samples;
    std::uint64_t seed = 0;
    std::size_t iters = 0, burnin = 0, thin = 0, pmax = 0, qmax = 0, chains = 0, n = 0;
    double lambda = 0.0, d = 0.0, mu = 0.0, sigma = 0.0;
    std::vector<double> phi, theta;
    bool rj = false, prior_only = false, header = false;
  } fl;

  std::map<std::string, CLI::App*> subs;
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;
  auto add = [&](const std::string& name, const std::string& desc) {
    auto* s = app.add_subcommand(name, desc);
    subs[name] = s;
    auto& o = opts[name];
    o["config"] = s->add_option("--config", fl.config, "JSON config file");
    o["output"] = s->add_option("--output", fl.output, "output path (default stdout)");
    o["seed"] = s->add_option("--seed", fl.seed, "64-bit master seed");
    return s;
  };
  auto add_fit_flags = [&](const std::string& name) {
    auto* s = subs[name];
    auto& o = opts[name];
    o["input"] = s->add_option("--input", fl.input, "input CSV, one value per line");
    o["samples"] = s->add_option("--samples", fl.samples, "write draws to this CSV");
    o["iters"] = s->add_option("--iters", fl.iters, "total iterations incl. burn-in");
    o["burnin"] = s->add_option("--burnin", fl.burnin, "burn-in iterations");
    o["thin"] = s->add_option("--thin", fl.thin, "thinning interval");
    o["likelihood"] = s->add_option("--likelihood", fl.likelihood, "exact | approx")
                          ->check(CLI::IsMember({"exact", "approx"}));
    o["model"] = s->add_option("--model", fl.model, "short-memory order p,q");
    o["chains"] = s->add_option("--chains", fl.chains, "number of chains");
    o["rj"] = s->add_flag("--rj", fl.rj, "reversible jump over (p,q)");
    o["pmax"] = s->add_option("--pmax", fl.pmax, "largest AR order");
    o["qmax"] = s->add_option("--qmax", fl.qmax, "largest MA order");
    o["lambda"] = s->add_option("--lambda", fl.lambda, "Poisson model-prior rate");
    o["prior_only"] = s->add_flag("--prior-only", fl.prior_only, "ignore the likelihood");
  };

  auto* sim = add("simulate", "simulate an ARFIMA series to CSV");
  opts["simulate"]["n"] = sim->add_option("--n", fl.n, "series length");
  opts["simulate"]["d"] = sim->add_option("--d", fl.d, "memory parameter");
  opts["simulate"]["phi"] = sim->add_option("--phi", fl.phi, "AR coefficients (+ convention)");
  opts["simulate"]["theta"] = sim->add_option("--theta", fl.theta, "MA coefficients");
  opts["simulate"]["mu"] = sim->add_option("--mu", fl.mu, "mean");
  opts["simulate"]["sigma"] = sim->add_option("--sigma", fl.sigma, "innovation scale");
  opts["simulate"]["header"] = sim->add_flag("--header", fl.header, "write an 'x' header line");
  add("fit", "fit a fixed-order model (or --rj)");
  add_fit_flags("fit");
  add("rjfit", "reversible-jump fit over (p,q)");
  add_fit_flags("rjfit");
  auto* est = add("estimate", "classical estimators of d");
  opts["estimate"]["input"] = est->add_option("--input", fl.input, "input CSV");
  auto* mc = add("mcstudy", "Monte Carlo study over an (n, d) grid");
  opts["mcstudy"]["iters"] = mc->add_option("--iters", fl.iters, "iterations per fit");
  opts["mcstudy"]["burnin"] = mc->add_option("--burnin", fl.burnin, "burn-in per fit");
  opts["mcstudy"]["thin"] = mc->add_option("--thin", fl.thin, "thinning interval");
  opts["mcstudy"]["likelihood"] = mc->add_option("--likelihood", fl.likelihood, "exact | approx")
                                      ->check(CLI::IsMember({"exact", "approx"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return e.get_exit_code() == 0 ? kOk : kConfig;
  }

  std::string command;
  for (const auto& [name, s] : subs) {
    if (s->parsed()) command = name;
  }
  const auto& o = opts[command];
  auto given = [&](const char* k) { return o.count(k) && o.at(k)->count() > 0; };

  try {
    json user = nullptr;
    if (given("config")) {
      std::ifstream f(fl.config);
      if (!f) throw ConfigError("cannot open config file '" + fl.config + "'");
      try {
        user = json::parse(f);
      } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + fl.config + "' is not valid JSON: " + e.what());
      }
    }
    json cfg = resolve_config(command, user);
    if (given("output")) cfg["output"] = fl.output;
    if (given("seed")) cfg["seed"] = fl.seed;
    if (given("input")) cfg["input"] = fl.input;
    if (given("samples")) cfg["samples"] = fl.samples;
    if (given("iters")) cfg["iters"] = fl.iters;
    if (given("burnin")) cfg["burnin"] = fl.burnin;
    if (given("thin")) cfg["thin"] = fl.thin;
    if (given("likelihood")) cfg["likelihood"] = fl.likelihood;
    if (given("chains")) cfg["chains"] = fl.chains;
    if (given("model")) {
      std::size_t p = 0, q = 0;
      char comma = 0;
      std::istringstream ss(fl.model);
      if (!(ss >> p >> comma >> q) || comma != ',' || !ss.eof()) {
        throw ConfigError("--model expects 'p,q', got '" + fl.model + "'");
      }
      cfg["model"] = {p, q};
    }
    if (given("rj") && fl.rj) cfg["rj"]["enabled"] = true;
    if (given("pmax")) cfg["rj"]["pmax"] = fl.pmax;
    if (given("qmax")) cfg["rj"]["qmax"] = fl.qmax;
    if (given("lambda")) cfg["rj"]["lambda"] = fl.lambda;
    if (given("prior_only") && fl.prior_only) cfg["prior_only"] = true;
    if (given("n")) cfg["n"] = fl.n;
    if (given("d")) cfg["d"] = fl.d;
    if (given("phi")) cfg["phi"] = fl.phi;
    if (given("theta")) cfg["theta"] = fl.theta;
    if (given("mu")) cfg["mu"] = fl.mu;
    if (given("sigma")) cfg["sigma"] = fl.sigma;
    if (given("header") && fl.header) cfg["header"] = true;

    if (command == "simulate") {
      const json doc = cmd_simulate(cfg);
      const auto x = doc.at("series").get<std::vector<double>>();
      if (!cfg.at("output").is_null()) {
        write_series_csv(cfg.at("output").get<std::string>(), x, cfg.at("header").get<bool>());
      } else {
        if (cfg.at("header").get<bool>()) out << "x\n";
        for (double v : x) out << fmt(v) << "\n";
      }
      return kOk;
    }
    json doc;
    if (command == "fit") doc = cmd_fit(cfg);
    else if (command == "rjfit") doc = cmd_rjfit(cfg);
    else if (command == "estimate") doc = cmd_estimate(cfg);
    else doc = cmd_mcstudy(cfg);
    emit(cfg, doc, &out);
    if (command == "estimate" && doc.at("failures").get<int>() == 3) {
      err << "error: all estimators failed\n";
      return doc.at("estimates").at("RS").at("exit_code").get<int>();
    }
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace arfima::cli
