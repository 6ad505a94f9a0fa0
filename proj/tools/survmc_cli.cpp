#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "survmc/csv.hpp"
#include "survmc/diagnostics.hpp"
#include "survmc/fit.hpp"
#include "survmc/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace survmc;

namespace {

void print_summary(const SummaryTable& table) {
  std::cout << std::left << std::setw(16) << "parameter" << std::right
            << std::setw(12) << "mean" << std::setw(12) << "sd"
            << std::setw(12) << "q2.5" << std::setw(12) << "q50"
            << std::setw(12) << "q97.5" << '\n';
  for (const auto& r : table.rows) {
    std::cout << std::left << std::setw(16) << r.name << std::right
              << std::fixed << std::setprecision(5) << std::setw(12) << r.mean
              << std::setw(12) << r.sd << std::setw(12) << r.q2_5
              << std::setw(12) << r.q50 << std::setw(12) << r.q97_5 << '\n';
    std::cout.unsetf(std::ios::fixed);
  }
}

SimScenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario " + path);
  json j;
  in >> j;

  SimScenario sc;
  sc.family = family_from_string(j.at("family").get<std::string>());
  sc.n = j.at("n").get<std::size_t>();
  if (j.contains("seed")) sc.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("censor_time")) sc.censor_time = j["censor_time"].get<double>();
  if (j.contains("censor_rate")) sc.censor_rate = j["censor_rate"].get<double>();
  if (j.contains("partition"))
    sc.partition.knots = j["partition"].at("knots").get<std::vector<double>>();

  const json& t = j.at("truth");
  auto vec = [&](const char* key) { return t.at(key).get<std::vector<double>>(); };
  switch (sc.family) {
    case Family::Aft:
      sc.aft.beta = vec("beta");
      sc.aft.alpha = t.at("alpha").get<double>();
      break;
    case Family::PhPiecewise:
      if (t.contains("beta")) sc.ph.beta = vec("beta");
      sc.ph.lambdas = vec("lambdas");
      sc.partition.validate();
      break;
    case Family::Cure:
      sc.cure.betaC = vec("betaC");
      sc.cure.betaU = vec("betaU");
      sc.cure.lambda = t.at("lambda").get<double>();
      sc.cure.alpha = t.at("alpha").get<double>();
      break;
    case Family::CompetingRisks:
      sc.competing.beta = t.at("beta").get<std::vector<std::vector<double>>>();
      sc.competing.lambdas = vec("lambdas");
      sc.competing.alphas = vec("alphas");
      break;
    case Family::IllnessDeath: {
      const auto beta = t.at("beta").get<std::vector<std::vector<double>>>();
      const auto lambdas = vec("lambdas");
      const auto alphas = vec("alphas");
      if (beta.size() != 3 || lambdas.size() != 3 || alphas.size() != 3)
        throw std::runtime_error("illness-death truth needs three transitions");
      for (int k = 0; k < 3; ++k) {
        sc.illness.beta[k] = beta[static_cast<std::size_t>(k)];
        sc.illness.lambdas[k] = lambdas[static_cast<std::size_t>(k)];
        sc.illness.alphas[k] = alphas[static_cast<std::size_t>(k)];
      }
      break;
    }
    case Family::Frailty:
      sc.frailty.beta = vec("beta");
      sc.frailty.alpha = t.at("alpha").get<double>();
      if (t.contains("psi")) sc.frailty.psi = t.at("psi").get<double>();
      if (t.contains("precision")) {
        sc.frailty.variant = FrailtyVariant::AdditiveNormal;
        sc.frailty.precision = t.at("precision").get<double>();
      }
      sc.n_groups = t.at("n_groups").get<std::size_t>();
      break;
    case Family::Joint: {
      sc.joint.betaL = vec("betaL");
      sc.joint.betaS = vec("betaS");
      sc.joint.gamma = t.at("gamma").get<double>();
      sc.joint.alpha = t.at("alpha").get<double>();
      sc.joint.sigma = t.at("sigma").get<double>();
      const auto S = vec("Sigma");
      sc.joint.s11 = S.at(0);
      sc.joint.s12 = S.at(1);
      sc.joint.s22 = S.at(2);
      if (t.contains("visit_spacing")) sc.visit_spacing = t["visit_spacing"].get<double>();
      if (t.contains("max_visits")) sc.max_visits = t["max_visits"].get<std::size_t>();
      break;
    }
  }
  return sc;
}

std::vector<std::string> covariate_names(const SurvivalDataset& data) {
  std::vector<std::string> names;
  for (const auto& name : data.design.column_names)
    if (name != "intercept") names.push_back(name);
  return names;
}

void append_covariates(std::vector<std::string>& row, const SurvivalDataset& data,
                       std::size_t i) {
  for (std::size_t j = 0; j < data.design.n_cols; ++j)
    if (data.design.column_names[j] != "intercept")
      row.push_back(format_number(data.design(i, j)));
}

void write_dataset_csv(const std::string& path, const SurvivalDataset& data,
                       Family family) {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  const auto covs = covariate_names(data);

  if (family == Family::IllnessDeath) {
    header = {"id", "t1", "t2", "t3", "e1", "e2", "e3"};
    header.insert(header.end(), covs.begin(), covs.end());
    for (std::size_t i = 0; i < data.n(); ++i) {
      const auto& r = data.multistate[i];
      std::vector<std::string> row = {
          std::to_string(i + 1),        format_number(r.t1),
          format_number(r.t2),          format_number(r.t3),
          std::to_string(r.event[0]),   std::to_string(r.event[1]),
          std::to_string(r.event[2])};
      append_covariates(row, data, i);
      rows.push_back(std::move(row));
    }
  } else if (family == Family::Joint) {
    header = {"id", "time", "delta", "long_time", "long_value"};
    header.insert(header.end(), covs.begin(), covs.end());
    for (std::size_t i = 0; i < data.n(); ++i) {
      const auto& obs = data.observations[i];
      const double time = obs.kind == CensorKind::Exact ? obs.t : obs.c_lower;
      const int delta = obs.kind == CensorKind::Exact ? 1 : 0;
      for (const auto& pt : data.longitudinal[i]) {
        std::vector<std::string> row = {std::to_string(i + 1), format_number(time),
                                        std::to_string(delta),
                                        format_number(pt.time),
                                        format_number(pt.value)};
        append_covariates(row, data, i);
        rows.push_back(std::move(row));
      }
    }
  } else {
    header = {"id", "time",
              family == Family::CompetingRisks ? "cause" : "delta"};
    if (family == Family::Frailty) header.push_back("group");
    header.insert(header.end(), covs.begin(), covs.end());
    for (std::size_t i = 0; i < data.n(); ++i) {
      const auto& obs = data.observations[i];
      const double time = obs.kind == CensorKind::Exact ? obs.t : obs.c_lower;
      std::vector<std::string> row = {std::to_string(i + 1), format_number(time)};
      if (family == Family::CompetingRisks) {
        row.push_back(std::to_string(
            obs.kind == CensorKind::Exact ? obs.event_label : 0));
      } else {
        row.push_back(obs.kind == CensorKind::Exact ? "1" : "0");
      }
      if (family == Family::Frailty)
        row.push_back(std::to_string(data.group[i] + 1));
      append_covariates(row, data, i);
      rows.push_back(std::move(row));
    }
  }
  write_csv(path, header, rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian survival model fitting"};
  app.require_subcommand(1);

  std::string config_path, samples_path, request_path, scenario_path;
  std::string out_dir = ".";
  std::string out_file = "simulated.csv";
  std::uint64_t seed = 0;
  std::size_t chains = 0, burnin = 0, iter = 0, thin = 0;
  bool strict = false;
  bool have_seed = false;

  auto* fit_cmd = app.add_subcommand("fit", "fit a model and write posterior artifacts");
  fit_cmd->add_option("--config", config_path, "JSON fit configuration")->required();
  fit_cmd->add_option("--seed", seed, "RNG seed override");
  fit_cmd->add_option("--chains", chains, "number of chains override");
  fit_cmd->add_option("--burnin", burnin, "burn-in override");
  fit_cmd->add_option("--iter", iter, "post-burn-in iterations override");
  fit_cmd->add_option("--thin", thin, "thinning override");
  fit_cmd->add_flag("--strict", strict, "nonzero exit when PSRF exceeds the threshold");
  fit_cmd->add_option("--out-dir", out_dir, "output directory");

  auto* sum_cmd = app.add_subcommand("summarize", "summary table from samples.csv");
  sum_cmd->add_option("--samples", samples_path, "samples.csv path")->required();
  sum_cmd->add_option("--out-dir", out_dir, "output directory");

  auto* diag_cmd = app.add_subcommand("diagnose", "convergence diagnostics from samples.csv");
  diag_cmd->add_option("--samples", samples_path, "samples.csv path")->required();
  diag_cmd->add_option("--out-dir", out_dir, "output directory");

  auto* derive_cmd = app.add_subcommand("derive", "derived quantities from samples.csv");
  derive_cmd->add_option("--config", config_path, "JSON fit configuration")->required();
  derive_cmd->add_option("--samples", samples_path, "samples.csv path")->required();
  derive_cmd->add_option("--request", request_path, "JSON derive request")->required();
  derive_cmd->add_option("--out-dir", out_dir, "output directory");

  auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic dataset");
  sim_cmd->add_option("--scenario", scenario_path, "JSON scenario")->required();
  sim_cmd->add_option("--seed", seed, "RNG seed override");
  sim_cmd->add_option("--out", out_file, "output CSV path");

  CLI11_PARSE(app, argc, argv);
  have_seed = fit_cmd->count("--seed") > 0 || sim_cmd->count("--seed") > 0;

  try {
    if (*fit_cmd) {
      FitConfig cfg = parse_fit_config(config_path);
      if (have_seed) cfg.chains.seed = seed;
      if (chains) cfg.chains.n_chains = chains;
      if (fit_cmd->count("--burnin")) cfg.chains.burn_in = burnin;
      if (iter) cfg.chains.n_iter = iter;
      if (thin) cfg.chains.thin = thin;
      if (strict) cfg.strict = true;
      cfg.chains.validate();
      const FitResult result = run_fit(cfg, out_dir);
      print_summary(result.summary);
      if (result.samples.n_chains() >= 2)
        std::cout << "max PSRF: " << result.max_psrf << '\n';
      if (cfg.strict && result.max_psrf > cfg.psrf_threshold) {
        std::cerr << "PSRF " << result.max_psrf << " exceeds threshold "
                  << cfg.psrf_threshold << '\n';
        return 2;
      }
    } else if (*sum_cmd) {
      const PosteriorSamples samples = load_samples(samples_path);
      const SummaryTable table = summarize(samples);
      fs::create_directories(out_dir);
      write_summary_csv((fs::path(out_dir) / "summary.csv").string(), table);
      print_summary(table);
    } else if (*diag_cmd) {
      const PosteriorSamples samples = load_samples(samples_path);
      if (samples.n_chains() < 2)
        throw std::runtime_error("diagnostics need at least two chains");
      fs::create_directories(out_dir);
      std::vector<std::vector<std::string>> rows;
      for (std::size_t p = 0; p < samples.n_params(); ++p) {
        const double r = gelman_rubin_psrf(samples.parameter_chains(p));
        rows.push_back({samples.param_names[p], format_number(r)});
        std::cout << samples.param_names[p] << " PSRF " << r << '\n';
      }
      write_csv((fs::path(out_dir) / "diagnostics.csv").string(),
                {"parameter", "psrf"}, rows);
    } else if (*derive_cmd) {
      const FitConfig cfg = parse_fit_config(config_path);
      const PosteriorSamples samples = load_samples(samples_path);
      const DeriveRequest req = parse_derive_request(request_path);
      derive(samples, cfg, req, out_dir);
    } else if (*sim_cmd) {
      SimScenario sc = parse_scenario(scenario_path);
      if (have_seed) sc.seed = seed;
      const SurvivalDataset data = simulate(sc);
      write_dataset_csv(out_file, data, sc.family);
      std::cout << "wrote " << data.n() << " subjects to " << out_file << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
