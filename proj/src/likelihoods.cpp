#include "survmc/likelihoods.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "survmc/priors.hpp"

namespace survmc {

namespace {

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double obs_time(const CensoredObservation& obs) {
  return obs.kind == CensorKind::Exact ? obs.t : obs.c_lower;
}

// Weibull PH contribution with log h(t) = log(lam*a) + (a-1)log t + lp and
// H(t) = lam * t^a * exp(lp).
double weibull_contribution(const CensoredObservation& obs, double lam, double a,
                            double lp) {
  auto log_S = [&](double c) { return -lam * std::pow(c, a) * std::exp(lp); };
  double log_f = 0.0;
  if (obs.kind == CensorKind::Exact) {
    double log_h = std::log(lam * a) + (a - 1.0) * std::log(obs.t) + lp;
    log_f = log_density_from_hazard(log_h, -log_S(obs.t));
  }
  return censoring_loglik_contribution(obs, log_f, log_S);
}

}  // namespace

double aft_loglik(const AftParams& params, const SurvivalDataset& data) {
  if (!(params.alpha > 0.0)) throw std::invalid_argument("aft: alpha must be positive");
  const double a = params.alpha;
  double ll = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double mu = data.design.row_dot(i, params.beta);
    const double lam = std::exp(-mu * a);
    ll += weibull_contribution(data.observations[i], lam, a, 0.0);
  }
  return ll;
}

double ph_piecewise_loglik(const PhParams& params, const SurvivalDataset& data,
                           const TimePartition& partition) {
  for (double l : params.lambdas)
    if (!(l > 0.0)) throw std::invalid_argument("ph: lambdas must be positive");
  double ll = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto& obs = data.observations[i];
    const double lp = params.beta.empty() ? 0.0 : data.design.row_dot(i, params.beta);
    auto log_S = [&](double c) {
      return c == 0.0 ? 0.0 : -piecewise_cumhaz(c, partition, params.lambdas) * std::exp(lp);
    };
    double log_f = 0.0;
    if (obs.kind == CensorKind::Exact) {
      const std::size_t k = interval_index(obs.t, partition);
      log_f = std::log(params.lambdas[k - 1]) + lp + log_S(obs.t);
    }
    ll += censoring_loglik_contribution(obs, log_f, log_S);
  }
  return ll;
}

double cure_loglik(const CureParams& params, const SurvivalDataset& data) {
  if (!(params.alpha > 0.0) || !(params.lambda > 0.0))
    throw std::invalid_argument("cure: alpha and lambda must be positive");
  const double a = params.alpha;
  const double lam = params.lambda;
  if (params.betaC.size() != data.design.n_cols + 1)
    throw std::invalid_argument("cure: betaC must cover intercept + covariates");
  double ll = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto& obs = data.observations[i];
    double lpC = params.betaC[0];
    for (std::size_t j = 0; j < data.design.n_cols; ++j)
      lpC += data.design(i, j) * params.betaC[j + 1];
    const double log_eta = -softplus(-lpC);
    const double log_1m_eta = -softplus(lpC);
    const double lpU = params.betaU.empty() ? 0.0 : data.design.row_dot(i, params.betaU);
    const double t = obs_time(obs);
    const double log_Su = -lam * std::pow(t, a) * std::exp(lpU);
    if (obs.kind == CensorKind::Exact) {
      const double log_h = std::log(lam * a) + (a - 1.0) * std::log(t) + lpU;
      ll += log_1m_eta + log_h + log_Su;
    } else if (obs.kind == CensorKind::Right) {
      // log(eta + (1-eta) Su)
      const double x = log_eta;
      const double y = log_1m_eta + log_Su;
      const double m = std::max(x, y);
      ll += m + std::log(std::exp(x - m) + std::exp(y - m));
    } else {
      throw std::invalid_argument("cure: only exact and right-censored observations");
    }
  }
  return ll;
}

double competing_risks_loglik(const CompetingRisksParams& params,
                              const SurvivalDataset& data) {
  const std::size_t K = params.lambdas.size();
  if (params.alphas.size() != K || params.beta.size() != K)
    throw std::invalid_argument("competing risks: parameter blocks must agree on K");
  for (std::size_t k = 0; k < K; ++k)
    if (!(params.lambdas[k] > 0.0) || !(params.alphas[k] > 0.0))
      throw std::invalid_argument("competing risks: scales and shapes must be positive");
  double ll = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto& obs = data.observations[i];
    const int cause = obs.kind == CensorKind::Exact ? obs.event_label : 0;
    if (cause < 0 || cause > static_cast<int>(K))
      throw std::invalid_argument("competing risks: invalid cause label");
    const double t = obs_time(obs);
    for (std::size_t k = 0; k < K; ++k) {
      const double lp = data.design.row_dot(i, params.beta[k]);
      const double lam = params.lambdas[k];
      const double a = params.alphas[k];
      if (cause == static_cast<int>(k) + 1)
        ll += std::log(lam * a) + (a - 1.0) * std::log(t) + lp;
      ll -= lam * std::pow(t, a) * std::exp(lp);
    }
  }
  return ll;
}

double illness_death_loglik(const IllnessDeathParams& params,
                            const SurvivalDataset& data) {
  for (int k = 0; k < 3; ++k)
    if (!(params.lambdas[k] > 0.0) || !(params.alphas[k] > 0.0))
      throw std::invalid_argument("illness-death: scales and shapes must be positive");
  if (data.multistate.size() != data.design.n_rows)
    throw std::invalid_argument("illness-death: missing multistate records");
  double ll = 0.0;
  for (std::size_t i = 0; i < data.multistate.size(); ++i) {
    const auto& rec = data.multistate[i];
    if (rec.event[2] == 1 && rec.event[0] != 1)
      throw std::invalid_argument("illness-death: 2->3 transition without 1->2");
    const double times[3] = {rec.t1, rec.t2, rec.t3};
    for (int k = 0; k < 3; ++k) {
      const double lp = data.design.row_dot(i, params.beta[k]);
      const double lam = params.lambdas[k];
      const double a = params.alphas[k];
      if (rec.event[k] == 1)
        ll += std::log(lam * a) + (a - 1.0) * std::log(times[k]) + lp;
      ll -= lam * std::pow(times[k], a) * std::exp(lp);
    }
  }
  return ll;
}

double frailty_loglik_group(const FrailtyParams& params, const SurvivalDataset& data,
                            const std::vector<std::vector<std::size_t>>& members,
                            std::size_t group) {
  const bool mult = params.variant == FrailtyVariant::MultiplicativeGamma;
  double ll = mult ? log_gamma_pdf(params.w[group], params.psi, params.psi)
                   : log_normal_pdf(params.b[group], 0.0,
                                    1.0 / std::sqrt(params.precision));
  for (std::size_t i : members[group]) {
    const double lp = data.design.row_dot(i, params.beta) +
                      (mult ? std::log(params.w[group]) : params.b[group]);
    ll += weibull_contribution(data.observations[i], 1.0, params.alpha, lp);
  }
  return ll;
}

double frailty_loglik(const FrailtyParams& params, const SurvivalDataset& data) {
  if (!(params.alpha > 0.0)) throw std::invalid_argument("frailty: alpha must be positive");
  const std::size_t G = data.n_groups();
  if (params.variant == FrailtyVariant::MultiplicativeGamma) {
    if (!(params.psi > 0.0)) throw std::invalid_argument("frailty: psi must be positive");
    if (params.w.size() != G) throw std::invalid_argument("frailty: w length mismatch");
    for (double w : params.w)
      if (!(w > 0.0)) throw std::invalid_argument("frailty: w must be positive");
  } else {
    if (!(params.precision > 0.0))
      throw std::invalid_argument("frailty: precision must be positive");
    if (params.b.size() != G) throw std::invalid_argument("frailty: b length mismatch");
  }
  std::vector<std::vector<std::size_t>> members(G);
  for (std::size_t i = 0; i < data.n(); ++i)
    members[static_cast<std::size_t>(data.group[i])].push_back(i);
  double ll = 0.0;
  for (std::size_t g = 0; g < G; ++g)
    ll += frailty_loglik_group(params, data, members, g);
  return ll;
}

double joint_loglik_subject(const JointParams& params, const SurvivalDataset& data,
                            const GLRule& rule, std::size_t i) {
  const auto& obs = data.observations[i];
  const auto& b = params.b[i];
  double ll = log_mvn2_pdf(b[0], b[1], params.s11, params.s12, params.s22);

  // Longitudinal submodel
  for (const auto& pt : data.longitudinal[i]) {
    double mu = params.betaL[0] + b[0] + (params.betaL[1] + b[1]) * pt.time;
    for (std::size_t j = 1; j < data.design.n_cols; ++j)
      mu += params.betaL[j + 1] * data.design(i, j);
    ll += log_normal_pdf(pt.value, mu, params.sigma);
  }

  // Survival submodel via Gauss-Legendre on (0, T)
  const double T = obs_time(obs);
  const double lp_s = data.design.row_dot(i, params.betaS);
  auto hazard = [&](double u) {
    return params.alpha * std::pow(u, params.alpha - 1.0) *
           std::exp(lp_s + params.gamma * (b[0] + b[1] * u));
  };
  double H = 0.0;
  for (std::size_t k = 0; k < rule.order; ++k)
    H += rule.weights[k] * hazard(0.5 * T * (rule.nodes[k] + 1.0));
  H *= 0.5 * T;
  if (obs.kind == CensorKind::Exact) ll += std::log(hazard(T));
  ll -= H;
  return ll;
}

double joint_loglik(const JointParams& params, const SurvivalDataset& data,
                    const GLRule& rule) {
  if (!(params.alpha > 0.0) || !(params.sigma > 0.0))
    throw std::invalid_argument("joint: alpha and sigma must be positive");
  if (params.s11 <= 0.0 || params.s11 * params.s22 - params.s12 * params.s12 <= 0.0)
    throw std::invalid_argument("joint: Sigma must be positive-definite");
  if (data.longitudinal.size() != data.n() || params.b.size() != data.n())
    throw std::invalid_argument("joint: per-subject records missing");
  if (rule.order < 2) throw std::invalid_argument("joint: quadrature order too small");
  double ll = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i)
    ll += joint_loglik_subject(params, data, rule, i);
  return ll;
}

}  // namespace survmc
