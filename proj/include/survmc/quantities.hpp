#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "survmc/likelihoods.hpp"
#include "survmc/mcmc.hpp"

namespace survmc {

struct CurveGrid {
  std::vector<double> times;
  std::vector<double> values;  // posterior means
  std::string label;
};

// exp((x1 - x2)'beta), one value per draw.  Identical formula for the AFT
// relative median and the PH hazard ratio.
std::vector<double> exp_contrast(std::span<const double> x1,
                                 std::span<const double> x2,
                                 const std::vector<std::vector<double>>& beta_draws);

inline std::vector<double> relative_median(
    std::span<const double> x1, std::span<const double> x2,
    const std::vector<std::vector<double>>& beta_draws) {
  return exp_contrast(x1, x2, beta_draws);
}
inline std::vector<double> hazard_ratio(
    std::span<const double> x1, std::span<const double> x2,
    const std::vector<std::vector<double>>& beta_draws) {
  return exp_contrast(x1, x2, beta_draws);
}

// Inverse-logit of x'betaC per draw, stable at extreme linear predictors.
std::vector<double> cure_fraction(std::span<const double> x_incidence,
                                  const std::vector<std::vector<double>>& betaC_draws);

CurveGrid uncured_survival_curve(const std::vector<double>& times,
                                 const std::vector<CureParams>& draws,
                                 std::span<const double> x_latency,
                                 const std::string& label = "");

// Posterior-mean cumulative incidence of cause k (1-based) at time t via
// composite Simpson on the cause-specific-hazard-times-survival integrand.
double cif(std::size_t cause, double t, std::span<const double> x,
           const std::vector<CompetingRisksParams>& draws,
           std::size_t n_panels = 256);

// Semi-Markov illness-death transition probabilities, posterior means over
// draws. Transition order inside the params: 1->2, 1->3, 2->3.
double p11(double s, double t, const std::vector<IllnessDeathParams>& draws,
           std::span<const double> x);
double p22(double s, double t, const std::vector<IllnessDeathParams>& draws,
           std::span<const double> x, double rel_tol = 1e-8);
double p12(double s, double t, const std::vector<IllnessDeathParams>& draws,
           std::span<const double> x, double rel_tol = 1e-8);

struct TransitionComplements {
  double p13 = 0.0;
  double p23 = 0.0;
};
// Complement identities 1 - p11 - p12 and 1 - p22; negative beyond 1e-8
// is rejected.
TransitionComplements p13_p23(double p11_value, double p12_value,
                              double p22_value);

// Posterior mean of exp(-w_i * lambda * exp(x'beta_cov) * t^alpha) where
// lambda = exp(beta[0]) and beta_cov are the non-intercept coefficients.
CurveGrid frailty_survival_curve(const std::vector<double>& times,
                                 const std::vector<FrailtyParams>& draws,
                                 std::size_t group, std::span<const double> x_cov,
                                 const std::string& label = "");

// Seeded reproducible subsample of draw indices (without replacement).
std::vector<std::size_t> subsample_indices(std::size_t n_draws,
                                           std::size_t n_subsample,
                                           std::uint64_t seed);

// Per-draw parameter views extracted from pooled samples.
std::vector<CompetingRisksParams> extract_competing_draws(
    const PosteriorSamples& samples, std::size_t p, std::size_t K);
std::vector<IllnessDeathParams> extract_illness_death_draws(
    const PosteriorSamples& samples, std::size_t p);
std::vector<CureParams> extract_cure_draws(const PosteriorSamples& samples,
                                           std::size_t p);
std::vector<FrailtyParams> extract_frailty_draws(const PosteriorSamples& samples,
                                                 std::size_t p,
                                                 std::size_t n_groups);
std::vector<std::vector<double>> extract_named_draws(
    const PosteriorSamples& samples, const std::vector<std::string>& names);

}  // namespace survmc
