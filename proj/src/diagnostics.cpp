#include "survmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace survmc {

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v, double m) {
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// Batch-means variance of the mean times n.
double batch_means_var(const std::vector<double>& series) {
  const std::size_t n = series.size();
  const std::size_t n_batches = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n)))));
  const std::size_t len = n / n_batches;
  std::vector<double> bmeans;
  for (std::size_t b = 0; b < n_batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += series[i];
    bmeans.push_back(s / static_cast<double>(len));
  }
  const double m = mean_of(bmeans);
  return static_cast<double>(len) * variance_of(bmeans, m);
}

}  // namespace

const SummaryRow& SummaryTable::row(const std::string& name) const {
  for (const auto& r : rows)
    if (r.name == name) return r;
  throw std::invalid_argument("no summary row named " + name);
}

double gelman_rubin_psrf(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  if (m < 2) throw std::invalid_argument("psrf requires at least two chains");
  const std::size_t n = chains.front().size();
  if (n < 4) throw std::invalid_argument("psrf requires at least four draws");
  for (const auto& c : chains)
    if (c.size() != n) throw std::invalid_argument("psrf: unequal chain lengths");

  std::vector<double> chain_means(m);
  double W = 0.0;
  for (std::size_t c = 0; c < m; ++c) {
    chain_means[c] = mean_of(chains[c]);
    W += variance_of(chains[c], chain_means[c]);
  }
  W /= static_cast<double>(m);
  if (W <= 0.0) throw std::invalid_argument("psrf: zero within-chain variance");
  const double grand = mean_of(chain_means);
  double B = 0.0;
  for (double cm : chain_means) B += (cm - grand) * (cm - grand);
  B *= static_cast<double>(n) / static_cast<double>(m - 1);
  const double nd = static_cast<double>(n);
  return std::sqrt(((nd - 1.0) / nd * W + B / nd) / W);
}

double quantile_type7(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = h - std::floor(h);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double spectrum0(const std::vector<double>& series) {
  const std::size_t n = series.size();
  if (n < 16) return batch_means_var(series);
  const double m = mean_of(series);
  const double var0 = variance_of(series, m);
  if (var0 <= 0.0) return 0.0;

  // AR fit by Yule-Walker (Levinson-Durbin), order chosen by AIC;
  // spectral density at frequency zero is sigma^2 / (1 - sum phi)^2.
  const std::size_t max_order =
      std::min<std::size_t>(20, static_cast<std::size_t>(10.0 * std::log10(n)));
  std::vector<double> acov(max_order + 1, 0.0);
  for (std::size_t lag = 0; lag <= max_order; ++lag) {
    double s = 0.0;
    for (std::size_t i = lag; i < n; ++i) s += (series[i] - m) * (series[i - lag] - m);
    acov[lag] = s / static_cast<double>(n);
  }
  std::vector<double> phi(max_order + 1, 0.0), prev(max_order + 1, 0.0);
  double sigma2 = acov[0];
  double best_aic = static_cast<double>(n) * std::log(sigma2);
  double best_spec = sigma2;  // order 0
  for (std::size_t k = 1; k <= max_order; ++k) {
    double num = acov[k];
    for (std::size_t j = 1; j < k; ++j) num -= prev[j] * acov[k - j];
    const double refl = num / sigma2;
    phi[k] = refl;
    for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - refl * prev[k - j];
    sigma2 *= (1.0 - refl * refl);
    if (sigma2 <= 0.0) break;
    const double aic =
        static_cast<double>(n) * std::log(sigma2) + 2.0 * static_cast<double>(k);
    double phi_sum = 0.0;
    for (std::size_t j = 1; j <= k; ++j) phi_sum += phi[j];
    if (aic < best_aic && std::abs(1.0 - phi_sum) > 1e-8) {
      best_aic = aic;
      best_spec = sigma2 / ((1.0 - phi_sum) * (1.0 - phi_sum));
    }
    prev = phi;
  }
  if (!std::isfinite(best_spec) || best_spec <= 0.0) return batch_means_var(series);
  return best_spec;
}

SummaryTable summarize(const PosteriorSamples& samples) {
  if (samples.n_kept() * samples.n_chains() < 2)
    throw std::invalid_argument("summarize requires at least two draws");
  SummaryTable table;
  const auto pooled_rows = merge_chains(samples);
  const std::size_t N = pooled_rows.size();
  for (std::size_t j = 0; j < samples.n_params(); ++j) {
    std::vector<double> pooled(N);
    for (std::size_t i = 0; i < N; ++i) pooled[i] = pooled_rows[i][j];
    SummaryRow row;
    row.name = samples.param_names[j];
    row.mean = mean_of(pooled);
    row.sd = std::sqrt(variance_of(pooled, row.mean));
    row.naive_se = row.sd / std::sqrt(static_cast<double>(N));
    row.time_series_se = std::sqrt(spectrum0(pooled) / static_cast<double>(N));
    row.q2_5 = quantile_type7(pooled, 0.025);
    row.q25 = quantile_type7(pooled, 0.25);
    row.q50 = quantile_type7(pooled, 0.50);
    row.q75 = quantile_type7(pooled, 0.75);
    row.q97_5 = quantile_type7(pooled, 0.975);
    std::size_t pos = 0;
    for (double v : pooled)
      if (v > 0.0) ++pos;
    row.prob_positive = static_cast<double>(pos) / static_cast<double>(N);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<std::vector<double>> merge_chains(const PosteriorSamples& samples) {
  if (samples.draws.empty()) throw std::invalid_argument("merge of empty samples");
  std::vector<std::vector<double>> pooled;
  for (const auto& chain : samples.draws)
    pooled.insert(pooled.end(), chain.begin(), chain.end());
  return pooled;
}

}  // namespace survmc
