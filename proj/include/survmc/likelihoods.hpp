#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "survmc/core.hpp"
#include "survmc/quadrature.hpp"

namespace survmc {

// Weibull AFT with Gumbel errors: shape alpha, per-subject rate
// lambda_i = exp(-x_i'beta * alpha). Design includes the intercept.
struct AftParams {
  std::vector<double> beta;
  double alpha = 1.0;
};

// PH with piecewise-constant baseline. Design has no intercept.
struct PhParams {
  std::vector<double> beta;
  std::vector<double> lambdas;
};

// Mixture cure: logistic incidence on (intercept + covariates), Weibull PH
// latency on the covariates alone.
struct CureParams {
  std::vector<double> betaC;  // incidence, incl. intercept
  std::vector<double> betaU;  // latency, no intercept
  double lambda = 1.0;
  double alpha = 1.0;
};

// Cause-specific Weibull hazards; beta stored cause-major (beta[k] is the
// coefficient vector of cause k+1).
struct CompetingRisksParams {
  std::vector<std::vector<double>> beta;
  std::vector<double> lambdas;
  std::vector<double> alphas;
};

// Transitions 1->2, 1->3, 2->3 (semi-Markov clock reset on the third).
struct IllnessDeathParams {
  std::array<std::vector<double>, 3> beta;
  std::array<double, 3> lambdas{};
  std::array<double, 3> alphas{};
};

enum class FrailtyVariant { MultiplicativeGamma, AdditiveNormal };

// Shared frailty Weibull PH. Design includes the intercept, so
// lambda = exp(beta[0]). Multiplicative: w_i ~ Gamma(psi, psi);
// additive: b_i ~ N(0, 1/precision) enters the linear predictor.
struct FrailtyParams {
  std::vector<double> beta;
  double alpha = 1.0;
  double psi = 1.0;                 // gamma shape/rate (multiplicative)
  std::vector<double> w;            // latent frailties, one per group
  FrailtyVariant variant = FrailtyVariant::MultiplicativeGamma;
  std::vector<double> b;            // latent additive effects
  double precision = 1.0;           // additive-variant precision
};

// Shared-parameter joint model: linear mixed longitudinal submodel and a
// Weibull PH survival submodel linked through gamma*(b1 + b2*t).
struct JointParams {
  std::vector<double> betaL;        // intercept, slope, then extra covariates
  std::vector<double> betaS;        // survival design incl. intercept
  double gamma = 0.0;
  double alpha = 1.0;
  double sigma = 1.0;               // residual SD
  double s11 = 1.0, s12 = 0.0, s22 = 1.0;  // random-effects covariance
  std::vector<std::array<double, 2>> b;    // latent subject effects
};

double aft_loglik(const AftParams& params, const SurvivalDataset& data);

double ph_piecewise_loglik(const PhParams& params, const SurvivalDataset& data,
                           const TimePartition& partition);

double cure_loglik(const CureParams& params, const SurvivalDataset& data);

double competing_risks_loglik(const CompetingRisksParams& params,
                              const SurvivalDataset& data);

double illness_death_loglik(const IllnessDeathParams& params,
                            const SurvivalDataset& data);

// Includes the latent-frailty log prior term (gamma or normal).
double frailty_loglik(const FrailtyParams& params, const SurvivalDataset& data);
double frailty_loglik_group(const FrailtyParams& params, const SurvivalDataset& data,
                            const std::vector<std::vector<std::size_t>>& members,
                            std::size_t group);

// Includes the latent random-effects MVN prior term.
double joint_loglik(const JointParams& params, const SurvivalDataset& data,
                    const GLRule& rule);
double joint_loglik_subject(const JointParams& params, const SurvivalDataset& data,
                            const GLRule& rule, std::size_t subject);

}  // namespace survmc
