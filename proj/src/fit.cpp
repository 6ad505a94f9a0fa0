#include "survmc/fit.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "survmc/quantities.hpp"

namespace survmc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool needs_intercept(Family family) {
  return family == Family::Aft || family == Family::Frailty ||
         family == Family::Joint;
}

CensoredObservation delta_observation(int id, double time, double delta) {
  if (delta != 0.0 && delta != 1.0)
    throw std::runtime_error("censor indicator must be 0 or 1");
  return delta == 1.0 ? CensoredObservation::exact(id, time)
                      : CensoredObservation::right(id, time);
}

// Covariate block: listed numeric columns (optionally z-scored), then factor
// indicator contrasts against the first sorted level.
struct CovariateBlock {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;  // column-major over kept rows
};

CovariateBlock build_covariates(const CsvTable& table,
                                const std::vector<std::size_t>& keep,
                                const ColumnBindings& b) {
  CovariateBlock block;
  const std::set<std::string> standardize(b.standardize.begin(), b.standardize.end());
  for (const auto& name : b.covariates) {
    const std::size_t c = table.column(name);
    std::vector<double> col;
    col.reserve(keep.size());
    for (std::size_t r : keep) col.push_back(table.number(r, c));
    if (standardize.count(name)) {
      double mean = 0.0;
      for (double v : col) mean += v;
      mean /= static_cast<double>(col.size());
      double ss = 0.0;
      for (double v : col) ss += (v - mean) * (v - mean);
      const double sd = std::sqrt(ss / static_cast<double>(col.size() - 1));
      if (!(sd > 0.0)) throw std::runtime_error("cannot standardize constant column " + name);
      for (double& v : col) v = (v - mean) / sd;
    }
    block.names.push_back(name);
    block.columns.push_back(std::move(col));
  }
  for (const auto& name : b.factors) {
    const std::size_t c = table.column(name);
    std::set<std::string> levels;
    for (std::size_t r : keep) levels.insert(table.rows[r][c]);
    if (levels.size() < 2)
      throw std::runtime_error("factor " + name + " has fewer than two levels");
    bool first = true;
    for (const auto& level : levels) {
      if (first) {  // reference level
        first = false;
        continue;
      }
      std::vector<double> col;
      col.reserve(keep.size());
      for (std::size_t r : keep)
        col.push_back(table.rows[r][c] == level ? 1.0 : 0.0);
      block.names.push_back(name + "_" + level);
      block.columns.push_back(std::move(col));
    }
  }
  return block;
}

DesignMatrix assemble_design(const CovariateBlock& block, std::size_t n,
                             bool intercept) {
  DesignMatrix design;
  design.n_rows = n;
  design.n_cols = block.columns.size() + (intercept ? 1 : 0);
  design.values.assign(n * design.n_cols, 0.0);
  std::size_t j = 0;
  if (intercept) {
    design.column_names.push_back("intercept");
    for (std::size_t i = 0; i < n; ++i) design.values[i * design.n_cols] = 1.0;
    j = 1;
  }
  for (std::size_t k = 0; k < block.columns.size(); ++k, ++j) {
    design.column_names.push_back(block.names[k]);
    for (std::size_t i = 0; i < n; ++i)
      design.values[i * design.n_cols + j] = block.columns[k][i];
  }
  return design;
}

Prior prior_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "normal")
    return Prior::normal(j.at("mean").get<double>(), j.at("precision").get<double>());
  if (kind == "gamma")
    return Prior::gamma(j.at("shape").get<double>(), j.at("rate").get<double>());
  if (kind == "uniform")
    return Prior::uniform(j.at("lower").get<double>(), j.at("upper").get<double>());
  if (kind == "inv_wishart")
    return Prior::inv_wishart2(j.at("scale").get<double>(), j.at("df").get<double>());
  throw std::runtime_error("unknown prior kind: " + kind);
}

}  // namespace

SurvivalDataset load_dataset(const std::string& path, const ColumnBindings& b,
                             Family family) {
  const CsvTable table = read_csv(path);
  if (table.n_rows() == 0) throw std::runtime_error(path + ": no data rows");
  SurvivalDataset data;

  if (family == Family::Joint) {
    if (b.id.empty() || b.long_time.empty() || b.long_value.empty())
      throw std::runtime_error("joint model needs id/long_time/long_value bindings");
    const std::size_t cid = table.column(b.id);
    const std::size_t ctv = table.column(b.long_time);
    const std::size_t cvv = table.column(b.long_value);
    const std::size_t ct = table.column(b.time);
    const std::size_t cd = table.column(b.censor);
    // group long-format rows by id, order of first appearance
    std::vector<std::string> subject_ids;
    std::map<std::string, std::size_t> index;
    std::vector<std::vector<std::size_t>> rows_of;
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
      const std::string& key = table.rows[r][cid];
      auto [it, inserted] = index.try_emplace(key, subject_ids.size());
      if (inserted) {
        subject_ids.push_back(key);
        rows_of.emplace_back();
      }
      rows_of[it->second].push_back(r);
    }
    const std::size_t n = subject_ids.size();
    std::vector<std::size_t> first_rows;
    for (std::size_t i = 0; i < n; ++i) first_rows.push_back(rows_of[i].front());
    const CovariateBlock block = build_covariates(table, first_rows, b);
    data.design = assemble_design(block, n, true);
    data.longitudinal.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r0 = rows_of[i].front();
      data.observations.push_back(delta_observation(
          static_cast<int>(i), table.number(r0, ct), table.number(r0, cd)));
      for (std::size_t r : rows_of[i])
        data.longitudinal[i].push_back({table.number(r, ctv), table.number(r, cvv)});
    }
    data.validate();
    return data;
  }

  std::vector<std::size_t> keep(table.n_rows());
  for (std::size_t r = 0; r < keep.size(); ++r) keep[r] = r;
  const CovariateBlock block = build_covariates(table, keep, b);
  data.design = assemble_design(block, table.n_rows(), needs_intercept(family));

  if (family == Family::IllnessDeath) {
    for (const std::string* col : {&b.t1, &b.t2, &b.t3, &b.e1, &b.e2, &b.e3})
      if (col->empty())
        throw std::runtime_error("illness-death model needs t1..t3/e1..e3 bindings");
    const std::size_t c[6] = {table.column(b.t1), table.column(b.t2),
                              table.column(b.t3), table.column(b.e1),
                              table.column(b.e2), table.column(b.e3)};
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
      MultiStateRecord rec;
      rec.t1 = table.number(r, c[0]);
      rec.t2 = table.number(r, c[1]);
      rec.t3 = table.number(r, c[2]);
      for (int k = 0; k < 3; ++k)
        rec.event[k] = static_cast<int>(table.number(r, c[3 + static_cast<std::size_t>(k)]));
      data.multistate.push_back(rec);
      // terminal-time view; the likelihood reads the multistate records
      const double total = rec.event[0] ? rec.t1 + rec.t3 : rec.t2;
      const bool dead = rec.event[1] == 1 || rec.event[2] == 1;
      data.observations.push_back(dead
          ? CensoredObservation::exact(static_cast<int>(r), total)
          : CensoredObservation::right(static_cast<int>(r), total));
    }
    data.validate();
    return data;
  }

  const std::size_t ct = table.column(b.time);
  if (family == Family::CompetingRisks) {
    if (b.event.empty())
      throw std::runtime_error("competing risks needs an event (cause) binding");
    const std::size_t ce = table.column(b.event);
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
      const double time = table.number(r, ct);
      const int cause = static_cast<int>(table.number(r, ce));
      data.observations.push_back(
          cause == 0 ? CensoredObservation::right(static_cast<int>(r), time)
                     : CensoredObservation::exact(static_cast<int>(r), time, cause));
    }
  } else {
    if (b.censor.empty()) throw std::runtime_error("missing censor binding");
    const std::size_t cd = table.column(b.censor);
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
      data.observations.push_back(delta_observation(
          static_cast<int>(r), table.number(r, ct), table.number(r, cd)));
    }
  }

  if (family == Family::Frailty) {
    if (b.group.empty()) throw std::runtime_error("frailty model needs a group binding");
    const std::size_t cg = table.column(b.group);
    std::map<std::string, int> labels;  // order of first appearance
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
      const auto [it, inserted] =
          labels.try_emplace(table.rows[r][cg], static_cast<int>(labels.size()));
      data.group.push_back(it->second);
    }
  }
  data.validate();
  return data;
}

FitConfig parse_fit_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }

  FitConfig cfg;
  cfg.model.family = family_from_string(j.at("family").get<std::string>());
  cfg.data_path = j.at("data").get<std::string>();
  if (const fs::path p(cfg.data_path); p.is_relative())
    cfg.data_path = (fs::path(path).parent_path() / p).string();

  if (j.contains("bindings")) {
    const json& b = j["bindings"];
    auto str = [&](const char* key, std::string& out) {
      if (b.contains(key)) out = b[key].get<std::string>();
    };
    auto list = [&](const char* key, std::vector<std::string>& out) {
      if (b.contains(key)) out = b[key].get<std::vector<std::string>>();
    };
    str("time", cfg.bindings.time);
    str("censor", cfg.bindings.censor);
    str("event", cfg.bindings.event);
    str("group", cfg.bindings.group);
    str("id", cfg.bindings.id);
    str("long_time", cfg.bindings.long_time);
    str("long_value", cfg.bindings.long_value);
    str("t1", cfg.bindings.t1);
    str("t2", cfg.bindings.t2);
    str("t3", cfg.bindings.t3);
    str("e1", cfg.bindings.e1);
    str("e2", cfg.bindings.e2);
    str("e3", cfg.bindings.e3);
    list("covariates", cfg.bindings.covariates);
    list("factors", cfg.bindings.factors);
    list("standardize", cfg.bindings.standardize);
  }

  if (j.contains("partition")) {
    const json& p = j["partition"];
    if (p.contains("knots")) {
      cfg.model.partition.knots = p["knots"].get<std::vector<double>>();
    } else {
      cfg.model.partition = TimePartition::equally_spaced(
          p.at("intervals").get<std::size_t>(), p.at("t_max").get<double>());
    }
    cfg.model.partition.validate();
  }
  if (j.contains("n_risks")) cfg.model.n_risks = j["n_risks"].get<std::size_t>();
  if (j.contains("gl_order")) cfg.model.gl_order = j["gl_order"].get<std::size_t>();
  if (j.contains("frailty_variant")) {
    const std::string v = j["frailty_variant"].get<std::string>();
    if (v == "gamma")
      cfg.model.frailty_variant = FrailtyVariant::MultiplicativeGamma;
    else if (v == "normal")
      cfg.model.frailty_variant = FrailtyVariant::AdditiveNormal;
    else
      throw std::runtime_error("unknown frailty variant: " + v);
  }
  if (j.contains("priors")) {
    for (const auto& [name, spec] : j["priors"].items())
      cfg.model.prior_overrides.emplace(name, prior_from_json(spec));
  }
  if (j.contains("chains")) {
    const json& c = j["chains"];
    if (c.contains("chains")) cfg.chains.n_chains = c["chains"].get<std::size_t>();
    if (c.contains("burnin")) cfg.chains.burn_in = c["burnin"].get<std::size_t>();
    if (c.contains("iter")) cfg.chains.n_iter = c["iter"].get<std::size_t>();
    if (c.contains("thin")) cfg.chains.thin = c["thin"].get<std::size_t>();
    if (c.contains("seed")) cfg.chains.seed = c["seed"].get<std::uint64_t>();
    if (c.contains("adapt_window"))
      cfg.chains.adapt_window = c["adapt_window"].get<std::size_t>();
  }
  if (j.contains("psrf_threshold")) cfg.psrf_threshold = j["psrf_threshold"].get<double>();
  if (j.contains("strict")) cfg.strict = j["strict"].get<bool>();
  cfg.chains.validate();
  return cfg;
}

void write_samples_csv(const std::string& path, const PosteriorSamples& samples) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t c = 0; c < samples.n_chains(); ++c) {
    for (std::size_t it = 0; it < samples.draws[c].size(); ++it) {
      for (std::size_t p = 0; p < samples.n_params(); ++p) {
        rows.push_back({std::to_string(c + 1), std::to_string(it + 1),
                        samples.param_names[p],
                        format_number(samples.draws[c][it][p])});
      }
    }
  }
  write_csv(path, {"chain", "iteration", "parameter", "value"}, rows);
}

void write_summary_csv(const std::string& path, const SummaryTable& table) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : table.rows) {
    rows.push_back({r.name, format_number(r.mean), format_number(r.sd),
                    format_number(r.naive_se), format_number(r.time_series_se),
                    format_number(r.q2_5), format_number(r.q25),
                    format_number(r.q50), format_number(r.q75),
                    format_number(r.q97_5), format_number(r.prob_positive)});
  }
  write_csv(path,
            {"parameter", "mean", "sd", "naive_se", "time_series_se", "q2.5",
             "q25", "q50", "q75", "q97.5", "prob_positive"},
            rows);
}

PosteriorSamples load_samples(const std::string& path) {
  const CsvTable table = read_csv(path);
  const std::size_t cc = table.column("chain");
  const std::size_t ci = table.column("iteration");
  const std::size_t cp = table.column("parameter");
  const std::size_t cv = table.column("value");

  PosteriorSamples samples;
  std::map<std::string, std::size_t> param_index;
  std::size_t n_chains = 0, n_iter = 0;
  for (std::size_t r = 0; r < table.n_rows(); ++r) {
    const auto [it, inserted] = param_index.try_emplace(
        table.rows[r][cp], samples.param_names.size());
    if (inserted) samples.param_names.push_back(table.rows[r][cp]);
    n_chains = std::max(n_chains, static_cast<std::size_t>(table.number(r, cc)));
    n_iter = std::max(n_iter, static_cast<std::size_t>(table.number(r, ci)));
  }
  samples.draws.assign(
      n_chains, std::vector<std::vector<double>>(
                    n_iter, std::vector<double>(samples.param_names.size(), 0.0)));
  for (std::size_t r = 0; r < table.n_rows(); ++r) {
    const std::size_t c = static_cast<std::size_t>(table.number(r, cc)) - 1;
    const std::size_t it = static_cast<std::size_t>(table.number(r, ci)) - 1;
    samples.draws[c][it][param_index[table.rows[r][cp]]] = table.number(r, cv);
  }
  samples.config.n_chains = n_chains;
  samples.config.n_iter = n_iter * samples.config.thin;
  return samples;
}

FitResult run_fit(const FitConfig& config, const SurvivalDataset& data,
                  const std::string& out_dir) {
  const Target target = build_target(config.model, data);
  FitResult result;
  result.samples = run_chains(target, config.chains);
  result.summary = summarize(result.samples);
  if (result.samples.n_chains() >= 2) {
    for (std::size_t p = 0; p < result.samples.n_params(); ++p) {
      result.psrf_names.push_back(result.samples.param_names[p]);
      result.psrf.push_back(gelman_rubin_psrf(result.samples.parameter_chains(p)));
    }
    result.max_psrf = *std::max_element(result.psrf.begin(), result.psrf.end());
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_samples_csv((fs::path(out_dir) / "samples.csv").string(), result.samples);
    write_summary_csv((fs::path(out_dir) / "summary.csv").string(), result.summary);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t p = 0; p < result.psrf.size(); ++p)
      rows.push_back({result.psrf_names[p], format_number(result.psrf[p])});
    write_csv((fs::path(out_dir) / "diagnostics.csv").string(),
              {"parameter", "psrf"}, rows);
  }
  return result;
}

FitResult run_fit(const FitConfig& config, const std::string& out_dir) {
  const SurvivalDataset data =
      load_dataset(config.data_path, config.bindings, config.model.family);
  return run_fit(config, data, out_dir);
}

DeriveRequest parse_derive_request(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open request " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  DeriveRequest req;
  req.quantity = j.at("quantity").get<std::string>();
  auto vec = [&](const char* key, std::vector<double>& out) {
    if (j.contains(key)) out = j[key].get<std::vector<double>>();
  };
  vec("x1", req.x1);
  vec("x2", req.x2);
  vec("x", req.x);
  vec("times", req.times);
  if (j.contains("cause")) req.cause = j["cause"].get<std::size_t>();
  if (j.contains("s")) req.s = j["s"].get<double>();
  if (j.contains("group")) req.group = j["group"].get<std::size_t>();
  if (j.contains("subsample")) req.subsample = j["subsample"].get<std::size_t>();
  if (j.contains("seed")) req.seed = j["seed"].get<std::uint64_t>();
  return req;
}

namespace {

std::size_t count_prefix(const PosteriorSamples& samples, const std::string& prefix) {
  std::size_t n = 0;
  for (const auto& name : samples.param_names)
    if (name.rfind(prefix, 0) == 0) ++n;
  return n;
}

void require_family(const DeriveRequest& req, Family actual,
                    std::initializer_list<Family> allowed) {
  for (Family f : allowed)
    if (f == actual) return;
  throw std::runtime_error("quantity '" + req.quantity +
                           "' is not defined for family '" +
                           family_to_string(actual) + "'");
}

void write_draw_summary(const std::string& path, const std::string& name,
                        const std::vector<double>& draws) {
  std::vector<double> sorted = draws;
  double mean = 0.0;
  for (double v : sorted) mean += v;
  mean /= static_cast<double>(sorted.size());
  double ss = 0.0;
  for (double v : sorted) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(sorted.size() - 1));
  write_csv(path,
            {"quantity", "mean", "sd", "q2.5", "q50", "q97.5"},
            {{name, format_number(mean), format_number(sd),
              format_number(quantile_type7(sorted, 0.025)),
              format_number(quantile_type7(sorted, 0.5)),
              format_number(quantile_type7(sorted, 0.975))}});
}

void write_curves(const std::string& path, const std::vector<CurveGrid>& curves) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.times.size(); ++i)
      rows.push_back({c.label, format_number(c.times[i]),
                      format_number(c.values[i])});
  write_csv(path, {"label", "time", "value"}, rows);
}

template <class T>
std::vector<T> take(const std::vector<T>& all, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(all[i]);
  return out;
}

}  // namespace

void derive(const PosteriorSamples& samples, const FitConfig& config,
            const DeriveRequest& req, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const Family family = config.model.family;
  const fs::path dir(out_dir);

  auto beta_names = [&](const std::string& stem, std::size_t p) {
    std::vector<std::string> names;
    for (std::size_t j = 1; j <= p; ++j)
      names.push_back(stem + "[" + std::to_string(j) + "]");
    return names;
  };

  if (req.quantity == "relative_median" || req.quantity == "hazard_ratio") {
    require_family(req, family,
                   {req.quantity == "relative_median" ? Family::Aft
                                                      : Family::PhPiecewise});
    const std::size_t p = count_prefix(samples, "beta[");
    const auto betas = extract_named_draws(samples, beta_names("beta", p));
    write_draw_summary((dir / "contrast.csv").string(), req.quantity,
                       exp_contrast(req.x1, req.x2, betas));
    return;
  }
  if (req.quantity == "cure_fraction") {
    require_family(req, family, {Family::Cure});
    const std::size_t pc = count_prefix(samples, "betaC[");
    const auto betas = extract_named_draws(samples, beta_names("betaC", pc));
    write_draw_summary((dir / "contrast.csv").string(), req.quantity,
                       cure_fraction(req.x, betas));
    return;
  }

  const auto idx = subsample_indices(
      samples.n_chains() * samples.n_kept(), req.subsample, req.seed);

  if (req.quantity == "uncured_survival") {
    require_family(req, family, {Family::Cure});
    const std::size_t p = count_prefix(samples, "betaU[");
    const auto draws = take(extract_cure_draws(samples, p), idx);
    write_curves((dir / "curves.csv").string(),
                 {uncured_survival_curve(req.times, draws, req.x, "uncured_survival")});
    return;
  }
  if (req.quantity == "cif") {
    require_family(req, family, {Family::CompetingRisks});
    const std::size_t K = count_prefix(samples, "lambda[");
    const std::size_t p = count_prefix(samples, "beta[") / K;
    const auto draws = take(extract_competing_draws(samples, p, K), idx);
    CurveGrid grid;
    grid.label = "cif_" + std::to_string(req.cause);
    grid.times = req.times;
    for (double t : req.times)
      grid.values.push_back(cif(req.cause, t, req.x, draws));
    write_curves((dir / "curves.csv").string(), {grid});
    return;
  }
  if (req.quantity == "transitions") {
    require_family(req, family, {Family::IllnessDeath});
    const std::size_t p = count_prefix(samples, "beta[") / 3;
    const auto draws = take(extract_illness_death_draws(samples, p), idx);
    CurveGrid g11{req.times, {}, "p11"}, g12{req.times, {}, "p12"},
        g13{req.times, {}, "p13"}, g22{req.times, {}, "p22"},
        g23{req.times, {}, "p23"};
    for (double t : req.times) {
      const double v11 = p11(req.s, t, draws, req.x);
      const double v12 = p12(req.s, t, draws, req.x);
      const double v22 = p22(req.s, t, draws, req.x);
      const auto rest = p13_p23(v11, v12, v22);
      g11.values.push_back(v11);
      g12.values.push_back(v12);
      g22.values.push_back(v22);
      g13.values.push_back(rest.p13);
      g23.values.push_back(rest.p23);
    }
    write_curves((dir / "curves.csv").string(), {g11, g12, g13, g22, g23});
    return;
  }
  if (req.quantity == "frailty_survival") {
    require_family(req, family, {Family::Frailty});
    const std::size_t p = count_prefix(samples, "beta[");
    const std::size_t G = count_prefix(samples, "w[");
    if (G == 0) throw std::runtime_error("frailty_survival needs gamma frailties in the samples");
    const auto draws = take(extract_frailty_draws(samples, p, G), idx);
    write_curves((dir / "curves.csv").string(),
                 {frailty_survival_curve(req.times, draws, req.group, req.x,
                                         "frailty_survival")});
    return;
  }
  throw std::runtime_error("unknown derived quantity: " + req.quantity);
}

}  // namespace survmc
