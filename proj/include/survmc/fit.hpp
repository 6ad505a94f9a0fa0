#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "survmc/csv.hpp"
#include "survmc/diagnostics.hpp"
#include "survmc/mcmc.hpp"
#include "survmc/model.hpp"

namespace survmc {

// CSV column bindings. `censor` is a delta-style indicator (1 = observed
// event, 0 = right-censored at the recorded time). Families whose design
// carries an intercept (aft, frailty, joint) get the leading ones column
// automatically.
struct ColumnBindings {
  std::string time = "time";
  std::string censor;
  std::string event;                     // competing-risks cause label
  std::vector<std::string> covariates;   // numeric, used as-is
  std::vector<std::string> factors;      // expanded to indicators; first sorted
                                         // level is the reference
  std::vector<std::string> standardize;  // numeric columns to z-score
  std::string group;                     // frailty cluster label

  std::string t1, t2, t3, e1, e2, e3;    // illness-death layout

  std::string id, long_time, long_value; // joint long format
};

SurvivalDataset load_dataset(const std::string& path, const ColumnBindings& bindings,
                             Family family);

struct FitConfig {
  ModelSpec model;
  ChainConfig chains;
  std::string data_path;
  ColumnBindings bindings;
  double psrf_threshold = 1.1;
  bool strict = false;
};

// Parses the JSON config file; CLI flag overrides are applied afterwards.
FitConfig parse_fit_config(const std::string& path);

struct FitResult {
  PosteriorSamples samples;
  SummaryTable summary;
  std::vector<std::string> psrf_names;
  std::vector<double> psrf;
  double max_psrf = 0.0;
};

// Fits the model and writes samples.csv, summary.csv and diagnostics.csv
// under out_dir (created if missing). Empty out_dir skips the writes.
FitResult run_fit(const FitConfig& config, const std::string& out_dir);
FitResult run_fit(const FitConfig& config, const SurvivalDataset& data,
                  const std::string& out_dir);

void write_samples_csv(const std::string& path, const PosteriorSamples& samples);
void write_summary_csv(const std::string& path, const SummaryTable& table);
PosteriorSamples load_samples(const std::string& path);

struct DeriveRequest {
  std::string quantity;  // relative_median | hazard_ratio | cure_fraction |
                         // uncured_survival | cif | transitions | frailty_survival
  std::vector<double> x1, x2, x;
  std::vector<double> times;
  std::size_t cause = 1;
  double s = 0.0;            // transition conditioning time
  std::size_t group = 0;     // frailty subject group (0-based)
  std::size_t subsample = 200;
  std::uint64_t seed = 1;
};

DeriveRequest parse_derive_request(const std::string& path);

// Posterior summaries of a derived quantity; writes curves.csv (grid
// quantities) or contrast.csv (scalar draws) under out_dir.
void derive(const PosteriorSamples& samples, const FitConfig& config,
            const DeriveRequest& request, const std::string& out_dir);

}  // namespace survmc
