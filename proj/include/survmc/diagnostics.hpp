#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "survmc/mcmc.hpp"

namespace survmc {

struct SummaryRow {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double naive_se = 0.0;
  double time_series_se = 0.0;
  double q2_5 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q97_5 = 0.0;
  double prob_positive = 0.0;
};

struct SummaryTable {
  std::vector<SummaryRow> rows;
  const SummaryRow& row(const std::string& name) const;
};

// Potential scale reduction factor sqrt(((n-1)/n * W + B/n) / W).
double gelman_rubin_psrf(const std::vector<std::vector<double>>& chains);

// Type-7 (linear interpolation) empirical quantile of unsorted data.
double quantile_type7(std::vector<double> values, double p);

// Spectral-density-at-zero variance estimate for the time-series SE;
// falls back to batch means on short or degenerate chains.
double spectrum0(const std::vector<double>& series);

SummaryTable summarize(const PosteriorSamples& samples);

// Row-concatenation of chains, iteration order preserved within chain.
std::vector<std::vector<double>> merge_chains(const PosteriorSamples& samples);

}  // namespace survmc
