#include "survmc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace survmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-4;  // sojourn placeholder when state 2 is never entered

double weibull_time(double rate, double alpha, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  return std::pow(expo(rng) / rate, 1.0 / alpha);
}

// Invert E = H0(t) * exp(lp) for a piecewise-constant baseline; the last
// segment extends past the final knot so every draw lands somewhere.
double piecewise_time(double lp, const TimePartition& partition,
                      const std::vector<double>& lambdas, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  double target = expo(rng) / std::exp(lp);
  for (std::size_t k = 0; k + 1 < partition.knots.size(); ++k) {
    const double width = partition.knots[k + 1] - partition.knots[k];
    const double seg = lambdas[k] * width;
    if (target <= seg) return partition.knots[k] + target / lambdas[k];
    target -= seg;
  }
  return partition.knots.back() + target / lambdas.back();
}

DesignMatrix make_design(std::size_t n, std::size_t p, bool intercept,
                         std::mt19937_64& rng) {
  DesignMatrix design;
  design.n_rows = n;
  design.n_cols = p;
  design.values.resize(n * p);
  std::normal_distribution<double> norm(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      design.values[i * p + j] = (intercept && j == 0) ? 1.0 : norm(rng);
    }
  }
  for (std::size_t j = 0; j < p; ++j)
    design.column_names.push_back((intercept && j == 0) ? "intercept"
                                                        : "x" + std::to_string(j));
  return design;
}

void apply_censoring(SurvivalDataset& data, std::vector<double>& raw,
                     double horizon) {
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const int id = static_cast<int>(i);
    if (raw[i] > horizon) {
      data.observations[i] = CensoredObservation::right(id, horizon);
    } else {
      data.observations[i] = CensoredObservation::exact(id, raw[i]);
    }
  }
}

// Administrative time whose induced right-censored fraction best matches the
// target, found by bisection on the raw event times.
double horizon_for_rate(const std::vector<double>& raw, double rate) {
  double finite_max = 0.0;
  for (double t : raw)
    if (t < kInf) finite_max = std::max(finite_max, t);
  double lo = 0.0, hi = finite_max > 0.0 ? finite_max : 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    std::size_t censored = 0;
    for (double t : raw)
      if (t > mid) ++censored;
    const double frac = static_cast<double>(censored) / static_cast<double>(raw.size());
    if (frac > rate)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SurvivalDataset simulate(const SimScenario& sc) {
  if (sc.n < 1) throw std::invalid_argument("simulate: need at least one subject");
  std::mt19937_64 rng(sc.seed);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> norm(0.0, 1.0);

  SurvivalDataset data;
  std::vector<double> raw(sc.n, 0.0);

  switch (sc.family) {
    case Family::Aft: {
      data.design = make_design(sc.n, sc.aft.beta.size(), true, rng);
      for (std::size_t i = 0; i < sc.n; ++i) {
        const double mu = data.design.row_dot(i, sc.aft.beta);
        raw[i] = weibull_time(std::exp(-mu * sc.aft.alpha), sc.aft.alpha, rng);
      }
      break;
    }
    case Family::PhPiecewise: {
      data.design = make_design(sc.n, sc.ph.beta.size(), false, rng);
      for (std::size_t i = 0; i < sc.n; ++i) {
        const double lp = sc.ph.beta.empty() ? 0.0 : data.design.row_dot(i, sc.ph.beta);
        raw[i] = piecewise_time(lp, sc.partition, sc.ph.lambdas, rng);
      }
      break;
    }
    case Family::Cure: {
      if (!(sc.censor_time > 0.0) && !(sc.censor_rate > 0.0))
        throw std::invalid_argument("simulate: cure scenario needs censoring, cured subjects never fail");
      data.design = make_design(sc.n, sc.cure.betaU.size(), false, rng);
      for (std::size_t i = 0; i < sc.n; ++i) {
        double lpC = sc.cure.betaC[0];
        for (std::size_t j = 0; j < data.design.n_cols; ++j)
          lpC += data.design(i, j) * sc.cure.betaC[j + 1];
        const double eta = 1.0 / (1.0 + std::exp(-lpC));
        if (unif(rng) < eta) {
          raw[i] = kInf;  // cured
        } else {
          const double lpU = data.design.row_dot(i, sc.cure.betaU);
          raw[i] = weibull_time(sc.cure.lambda * std::exp(lpU), sc.cure.alpha, rng);
        }
      }
      break;
    }
    case Family::CompetingRisks: {
      const std::size_t K = sc.competing.lambdas.size();
      data.design = make_design(sc.n, sc.competing.beta.at(0).size(), false, rng);
      std::vector<int> cause(sc.n, 0);
      for (std::size_t i = 0; i < sc.n; ++i) {
        double best = kInf;
        for (std::size_t k = 0; k < K; ++k) {
          const double lp = data.design.row_dot(i, sc.competing.beta[k]);
          const double t = weibull_time(sc.competing.lambdas[k] * std::exp(lp),
                                        sc.competing.alphas[k], rng);
          if (t < best) {
            best = t;
            cause[i] = static_cast<int>(k) + 1;
          }
        }
        raw[i] = best;
      }
      const double horizon = sc.censor_rate > 0.0 ? horizon_for_rate(raw, sc.censor_rate)
                             : sc.censor_time > 0.0 ? sc.censor_time
                                                    : kInf;
      data.observations.resize(sc.n);
      for (std::size_t i = 0; i < sc.n; ++i) {
        const int id = static_cast<int>(i);
        if (raw[i] > horizon) {
          data.observations[i] = CensoredObservation::right(id, horizon);
        } else {
          data.observations[i] = CensoredObservation::exact(id, raw[i], cause[i]);
        }
      }
      data.validate();
      return data;
    }
    case Family::IllnessDeath: {
      data.design = make_design(sc.n, sc.illness.beta[0].size(), false, rng);
      data.multistate.resize(sc.n);
      data.observations.resize(sc.n);
      const double C = sc.censor_time > 0.0 ? sc.censor_time : kInf;
      for (std::size_t i = 0; i < sc.n; ++i) {
        std::array<double, 3> rate{};
        for (int k = 0; k < 3; ++k)
          rate[k] = sc.illness.lambdas[k] *
                    std::exp(data.design.row_dot(i, sc.illness.beta[k]));
        const double t12 = weibull_time(rate[0], sc.illness.alphas[0], rng);
        const double t13 = weibull_time(rate[1], sc.illness.alphas[1], rng);
        MultiStateRecord rec;
        if (C <= std::min(t12, t13)) {
          rec = {C, C, kEps, {0, 0, 0}};
        } else if (t13 < t12) {
          rec = {t13, t13, kEps, {0, 1, 0}};
        } else {
          const double sojourn = weibull_time(rate[2], sc.illness.alphas[2], rng);
          const int died = t12 + sojourn <= C ? 1 : 0;
          rec = {t12, t12, died ? sojourn : C - t12, {1, 0, died}};
        }
        data.multistate[i] = rec;
        // Terminal-time view used for summaries; the likelihood reads multistate.
        const double total = rec.event[0] ? rec.t1 + rec.t3 : rec.t2;
        const bool dead = rec.event[1] == 1 || rec.event[2] == 1;
        data.observations[i] = dead ? CensoredObservation::exact(static_cast<int>(i), total)
                                    : CensoredObservation::right(static_cast<int>(i), total);
      }
      data.validate();
      return data;
    }
    case Family::Frailty: {
      if (sc.n_groups < 1) throw std::invalid_argument("simulate: need at least one group");
      data.design = make_design(sc.n, sc.frailty.beta.size(), true, rng);
      data.group.resize(sc.n);
      const bool mult = sc.frailty.variant == FrailtyVariant::MultiplicativeGamma;
      std::vector<double> effect(sc.n_groups);
      std::gamma_distribution<double> gam(sc.frailty.psi, 1.0 / sc.frailty.psi);
      for (std::size_t g = 0; g < sc.n_groups; ++g)
        effect[g] = mult ? std::log(gam(rng))
                         : norm(rng) / std::sqrt(sc.frailty.precision);
      for (std::size_t i = 0; i < sc.n; ++i) {
        data.group[i] = static_cast<int>(i % sc.n_groups);
        const double lp = data.design.row_dot(i, sc.frailty.beta) +
                          effect[static_cast<std::size_t>(data.group[i])];
        raw[i] = weibull_time(std::exp(lp), sc.frailty.alpha, rng);
      }
      break;
    }
    case Family::Joint: {
      const std::size_t p = sc.joint.betaS.size();
      data.design = make_design(sc.n, p, true, rng);
      data.longitudinal.resize(sc.n);
      // Cholesky of the random-effects covariance
      const double l11 = std::sqrt(sc.joint.s11);
      const double l21 = sc.joint.s12 / l11;
      const double l22 = std::sqrt(sc.joint.s22 - l21 * l21);
      if (!(l22 > 0.0)) throw std::invalid_argument("simulate: Sigma not positive-definite");
      const double C = sc.censor_time > 0.0 ? sc.censor_time
                                            : sc.visit_spacing * static_cast<double>(sc.max_visits);
      for (std::size_t i = 0; i < sc.n; ++i) {
        const double z1 = norm(rng), z2 = norm(rng);
        const double b0 = l11 * z1;
        const double b1 = l21 * z1 + l22 * z2;
        const double lp = data.design.row_dot(i, sc.joint.betaS);

        // Thinning on the tau = t^alpha clock, where the hazard is
        // exp(lp + gamma*(b0 + b1*tau^(1/alpha))) and hence bounded on [0, C^alpha].
        const double g = sc.joint.gamma;
        const double bound = std::exp(lp + g * b0 + std::max(0.0, g * b1 * C));
        double tau = 0.0;
        const double tau_max = std::pow(C, sc.joint.alpha);
        double event = kInf;
        while (true) {
          tau += expo(rng) / bound;
          if (tau >= tau_max) break;
          const double t = std::pow(tau, 1.0 / sc.joint.alpha);
          const double h = std::exp(lp + g * (b0 + b1 * t));
          if (unif(rng) * bound <= h) {
            event = t;
            break;
          }
        }
        raw[i] = event;
        const double stop = std::min(event, C);
        for (std::size_t v = 0; v < sc.max_visits; ++v) {
          const double tv = sc.visit_spacing * static_cast<double>(v);
          if (v > 0 && tv >= stop) break;
          double mu = sc.joint.betaL[0] + b0 + (sc.joint.betaL[1] + b1) * tv;
          for (std::size_t j = 1; j < p; ++j)
            mu += sc.joint.betaL[j + 1] * data.design(i, j);
          data.longitudinal[i].push_back({tv, mu + sc.joint.sigma * norm(rng)});
        }
      }
      data.observations.resize(sc.n);
      apply_censoring(data, raw, C);
      data.validate();
      return data;
    }
  }

  double horizon = kInf;
  if (sc.censor_rate > 0.0) {
    horizon = horizon_for_rate(raw, sc.censor_rate);
  } else if (sc.censor_time > 0.0) {
    horizon = sc.censor_time;
  }
  data.observations.resize(sc.n);
  if (horizon == kInf) {
    for (std::size_t i = 0; i < sc.n; ++i)
      data.observations[i] = CensoredObservation::exact(static_cast<int>(i), raw[i]);
  } else {
    apply_censoring(data, raw, horizon);
  }
  data.validate();
  return data;
}

}  // namespace survmc
