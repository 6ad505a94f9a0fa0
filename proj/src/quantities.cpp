#include "survmc/quantities.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "survmc/quadrature.hpp"

namespace survmc {

namespace {

double dot(std::span<const double> x, const std::vector<double>& beta) {
  if (x.size() != beta.size()) {
    throw std::invalid_argument("covariate/coefficient length mismatch");
  }
  double s = 0.0;
  for (std::size_t j = 0; j < beta.size(); ++j) s += x[j] * beta[j];
  return s;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("no draws");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Flattened chain-major pooled draws.
std::vector<std::vector<double>> pooled(const PosteriorSamples& samples) {
  std::vector<std::vector<double>> out;
  for (const auto& chain : samples.draws) {
    out.insert(out.end(), chain.begin(), chain.end());
  }
  return out;
}

}  // namespace

std::vector<double> exp_contrast(std::span<const double> x1,
                                 std::span<const double> x2,
                                 const std::vector<std::vector<double>>& beta_draws) {
  if (x1.size() != x2.size()) {
    throw std::invalid_argument("contrast covariate vectors differ in length");
  }
  std::vector<double> out;
  out.reserve(beta_draws.size());
  for (const auto& beta : beta_draws) {
    out.push_back(std::exp(dot(x1, beta) - dot(x2, beta)));
  }
  return out;
}

std::vector<double> cure_fraction(std::span<const double> x_incidence,
                                  const std::vector<std::vector<double>>& betaC_draws) {
  std::vector<double> out;
  out.reserve(betaC_draws.size());
  for (const auto& beta : betaC_draws) {
    const double lp = dot(x_incidence, beta);
    const double eta = lp > 0.0 ? 1.0 / (1.0 + std::exp(-lp))
                                : std::exp(lp) / (1.0 + std::exp(lp));
    out.push_back(eta);
  }
  return out;
}

CurveGrid uncured_survival_curve(const std::vector<double>& times,
                                 const std::vector<CureParams>& draws,
                                 std::span<const double> x_latency,
                                 const std::string& label) {
  if (draws.empty()) throw std::invalid_argument("no draws");
  CurveGrid grid;
  grid.times = times;
  grid.label = label;
  grid.values.assign(times.size(), 0.0);
  for (const auto& d : draws) {
    const double rate = d.lambda * std::exp(dot(x_latency, d.betaU));
    for (std::size_t i = 0; i < times.size(); ++i) {
      grid.values[i] += std::exp(-rate * std::pow(times[i], d.alpha));
    }
  }
  for (auto& v : grid.values) v /= static_cast<double>(draws.size());
  return grid;
}

double cif(std::size_t cause, double t, std::span<const double> x,
           const std::vector<CompetingRisksParams>& draws,
           std::size_t n_panels) {
  if (draws.empty()) throw std::invalid_argument("no draws");
  if (cause < 1 || cause > draws.front().lambdas.size()) {
    throw std::invalid_argument("cause index out of range");
  }
  if (t < 0.0) throw std::invalid_argument("negative time");
  if (t == 0.0) return 0.0;
  std::vector<double> per_draw;
  per_draw.reserve(draws.size());
  for (const auto& d : draws) {
    const std::size_t K = d.lambdas.size();
    std::vector<double> rate(K);
    for (std::size_t k = 0; k < K; ++k) {
      rate[k] = d.lambdas[k] * std::exp(dot(x, d.beta[k]));
    }
    const std::size_t kc = cause - 1;
    // Substituting u = t v^{1/alpha_min} removes the u^{alpha-1} endpoint
    // singularity of the cause-specific hazard when alpha < 1.
    double alpha_min = d.alphas[0];
    for (double a : d.alphas) alpha_min = std::min(alpha_min, a);
    const double scale =
        rate[kc] * d.alphas[kc] * std::pow(t, d.alphas[kc]) / alpha_min;
    auto total_cumhaz = [&](double v) {
      double H = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        H += rate[k] * std::pow(t, d.alphas[k]) * std::pow(v, d.alphas[k] / alpha_min);
      }
      return H;
    };
    auto integrand = [&](double v) {
      return scale * std::pow(v, d.alphas[kc] / alpha_min - 1.0) *
             std::exp(-total_cumhaz(v));
    };
    // Truncate where the survival factor is below machine noise so the
    // panels resolve the region that actually carries mass.
    double v_max = 1.0;
    if (total_cumhaz(1.0) > 40.0) {
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (total_cumhaz(mid) > 40.0 ? hi : lo) = mid;
      }
      v_max = hi;
    }
    // Second substitution v = y^3 lifts the remaining v^{p-1} exponent (p
    // just above 1) to at least y^2, restoring Simpson's convergence rate.
    per_draw.push_back(simpson(
        [&](double y) { return 3.0 * y * y * integrand(y * y * y); }, 0.0,
        std::cbrt(v_max), n_panels));
  }
  return mean_of(per_draw);
}

namespace {

struct IdRates {
  std::array<double, 3> rate{};  // lambda_k * exp(x'beta_k)
  std::array<double, 3> alpha{};
};

IdRates id_rates(const IllnessDeathParams& d, std::span<const double> x) {
  IdRates r;
  for (std::size_t k = 0; k < 3; ++k) {
    r.rate[k] = d.lambdas[k] * std::exp(dot(x, d.beta[k]));
    r.alpha[k] = d.alphas[k];
  }
  return r;
}

void check_interval(double s, double t) {
  if (s < 0.0 || t < s) throw std::invalid_argument("need 0 <= s <= t");
}

}  // namespace

double p11(double s, double t, const std::vector<IllnessDeathParams>& draws,
           std::span<const double> x) {
  check_interval(s, t);
  if (draws.empty()) throw std::invalid_argument("no draws");
  std::vector<double> per_draw;
  per_draw.reserve(draws.size());
  for (const auto& d : draws) {
    const IdRates r = id_rates(d, x);
    double H = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {  // transitions out of state 1
      H += r.rate[k] * (std::pow(t, r.alpha[k]) - std::pow(s, r.alpha[k]));
    }
    per_draw.push_back(std::exp(-H));
  }
  return mean_of(per_draw);
}

double p22(double s, double t, const std::vector<IllnessDeathParams>& draws,
           std::span<const double> x, double rel_tol) {
  check_interval(s, t);
  if (s <= 0.0) {
    throw std::invalid_argument("p22 needs s > 0: illness cannot have occurred by time 0");
  }
  if (draws.empty()) throw std::invalid_argument("no draws");
  std::vector<double> per_draw;
  per_draw.reserve(draws.size());
  for (const auto& d : draws) {
    const IdRates r = id_rates(d, x);
    const double r12 = r.rate[0], a12 = r.alpha[0];
    const double r23 = r.rate[2], a23 = r.alpha[2];
    // Mixture over the (truncated-at-s) illness time u, sojourn clock reset.
    const double norm = -std::expm1(-r12 * std::pow(s, a12));
    auto integrand = [&](double u) {
      const double dens = r12 * a12 * std::pow(u, a12 - 1.0) *
                          std::exp(-r12 * std::pow(u, a12));
      const double surv = std::exp(-r23 * (std::pow(t - u, a23) - std::pow(s - u, a23)));
      return dens * surv;
    };
    const QuadResult q = gauss_kronrod(integrand, 0.0, s, rel_tol);
    per_draw.push_back(q.value / norm);
  }
  return mean_of(per_draw);
}

double p12(double s, double t, const std::vector<IllnessDeathParams>& draws,
           std::span<const double> x, double rel_tol) {
  check_interval(s, t);
  if (draws.empty()) throw std::invalid_argument("no draws");
  if (t == s) return 0.0;
  std::vector<double> per_draw;
  per_draw.reserve(draws.size());
  for (const auto& d : draws) {
    const IdRates r = id_rates(d, x);
    const double r12 = r.rate[0], a12 = r.alpha[0];
    const double r13 = r.rate[1], a13 = r.alpha[1];
    const double r23 = r.rate[2], a23 = r.alpha[2];
    auto integrand = [&](double u) {
      const double h12 = r12 * a12 * std::pow(u, a12 - 1.0);
      const double H1 = r12 * (std::pow(u, a12) - std::pow(s, a12)) +
                        r13 * (std::pow(u, a13) - std::pow(s, a13));
      const double H23 = r23 * std::pow(t - u, a23);
      return h12 * std::exp(-H1 - H23);
    };
    const QuadResult q = gauss_kronrod(integrand, s, t, rel_tol);
    per_draw.push_back(q.value);
  }
  return mean_of(per_draw);
}

TransitionComplements p13_p23(double p11_value, double p12_value,
                              double p22_value) {
  for (double p : {p11_value, p12_value, p22_value}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("transition probability outside [0,1]");
    }
  }
  TransitionComplements out;
  out.p13 = 1.0 - p11_value - p12_value;
  out.p23 = 1.0 - p22_value;
  if (out.p13 < -1e-8 || out.p23 < -1e-8) {
    throw std::runtime_error("transition probabilities sum past one");
  }
  out.p13 = std::max(out.p13, 0.0);
  out.p23 = std::max(out.p23, 0.0);
  return out;
}

CurveGrid frailty_survival_curve(const std::vector<double>& times,
                                 const std::vector<FrailtyParams>& draws,
                                 std::size_t group, std::span<const double> x_cov,
                                 const std::string& label) {
  if (draws.empty()) throw std::invalid_argument("no draws");
  CurveGrid grid;
  grid.times = times;
  grid.label = label;
  grid.values.assign(times.size(), 0.0);
  for (const auto& d : draws) {
    if (group >= d.w.size()) throw std::invalid_argument("group index out of range");
    std::vector<double> cov(d.beta.begin() + 1, d.beta.end());
    const double rate = d.w[group] * std::exp(d.beta[0]) * std::exp(dot(x_cov, cov));
    for (std::size_t i = 0; i < times.size(); ++i) {
      grid.values[i] += std::exp(-rate * std::pow(times[i], d.alpha));
    }
  }
  for (auto& v : grid.values) v /= static_cast<double>(draws.size());
  return grid;
}

std::vector<std::size_t> subsample_indices(std::size_t n_draws,
                                           std::size_t n_subsample,
                                           std::uint64_t seed) {
  std::vector<std::size_t> idx(n_draws);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (n_subsample >= n_draws) return idx;
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(n_subsample);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<std::vector<double>> extract_named_draws(
    const PosteriorSamples& samples, const std::vector<std::string>& names) {
  std::vector<std::size_t> cols;
  cols.reserve(names.size());
  for (const auto& n : names) cols.push_back(samples.index_of(n));
  const auto all = pooled(samples);
  std::vector<std::vector<double>> out;
  out.reserve(all.size());
  for (const auto& row : all) {
    std::vector<double> r;
    r.reserve(cols.size());
    for (std::size_t c : cols) r.push_back(row[c]);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CompetingRisksParams> extract_competing_draws(
    const PosteriorSamples& samples, std::size_t p, std::size_t K) {
  const auto all = pooled(samples);
  std::vector<std::size_t> bcol, lcol, acol;
  for (std::size_t k = 1; k <= K; ++k) {
    for (std::size_t j = 1; j <= p; ++j) {
      bcol.push_back(samples.index_of("beta[" + std::to_string(j) + "," +
                                      std::to_string(k) + "]"));
    }
    lcol.push_back(samples.index_of("lambda[" + std::to_string(k) + "]"));
    acol.push_back(samples.index_of("alpha[" + std::to_string(k) + "]"));
  }
  std::vector<CompetingRisksParams> out;
  out.reserve(all.size());
  for (const auto& row : all) {
    CompetingRisksParams d;
    d.beta.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
      d.beta[k].resize(p);
      for (std::size_t j = 0; j < p; ++j) d.beta[k][j] = row[bcol[k * p + j]];
      d.lambdas.push_back(row[lcol[k]]);
      d.alphas.push_back(row[acol[k]]);
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<IllnessDeathParams> extract_illness_death_draws(
    const PosteriorSamples& samples, std::size_t p) {
  const auto all = pooled(samples);
  std::array<std::vector<std::size_t>, 3> bcol;
  std::array<std::size_t, 3> lcol{}, acol{};
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t j = 1; j <= p; ++j) {
      bcol[k].push_back(samples.index_of("beta[" + std::to_string(j) + "," +
                                         std::to_string(k + 1) + "]"));
    }
    lcol[k] = samples.index_of("lambda[" + std::to_string(k + 1) + "]");
    acol[k] = samples.index_of("alpha[" + std::to_string(k + 1) + "]");
  }
  std::vector<IllnessDeathParams> out;
  out.reserve(all.size());
  for (const auto& row : all) {
    IllnessDeathParams d;
    for (std::size_t k = 0; k < 3; ++k) {
      d.beta[k].resize(p);
      for (std::size_t j = 0; j < p; ++j) d.beta[k][j] = row[bcol[k][j]];
      d.lambdas[k] = row[lcol[k]];
      d.alphas[k] = row[acol[k]];
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<CureParams> extract_cure_draws(const PosteriorSamples& samples,
                                           std::size_t p) {
  const auto all = pooled(samples);
  std::vector<std::size_t> ccol, ucol;
  for (std::size_t j = 1; j <= p + 1; ++j) {
    ccol.push_back(samples.index_of("betaC[" + std::to_string(j) + "]"));
  }
  for (std::size_t j = 1; j <= p; ++j) {
    ucol.push_back(samples.index_of("betaU[" + std::to_string(j) + "]"));
  }
  const std::size_t lcol = samples.index_of("lambda");
  const std::size_t acol = samples.index_of("alpha");
  std::vector<CureParams> out;
  out.reserve(all.size());
  for (const auto& row : all) {
    CureParams d;
    for (std::size_t c : ccol) d.betaC.push_back(row[c]);
    for (std::size_t c : ucol) d.betaU.push_back(row[c]);
    d.lambda = row[lcol];
    d.alpha = row[acol];
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<FrailtyParams> extract_frailty_draws(const PosteriorSamples& samples,
                                                 std::size_t p,
                                                 std::size_t n_groups) {
  const auto all = pooled(samples);
  std::vector<std::size_t> bcol, wcol;
  for (std::size_t j = 1; j <= p; ++j) {
    bcol.push_back(samples.index_of("beta[" + std::to_string(j) + "]"));
  }
  for (std::size_t g = 1; g <= n_groups; ++g) {
    wcol.push_back(samples.index_of("w[" + std::to_string(g) + "]"));
  }
  const std::size_t acol = samples.index_of("alpha");
  const std::size_t pcol = samples.index_of("psi");
  std::vector<FrailtyParams> out;
  out.reserve(all.size());
  for (const auto& row : all) {
    FrailtyParams d;
    for (std::size_t c : bcol) d.beta.push_back(row[c]);
    for (std::size_t c : wcol) d.w.push_back(row[c]);
    d.alpha = row[acol];
    d.psi = row[pcol];
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace survmc
