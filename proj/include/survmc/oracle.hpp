#pragma once

// Straight-line reference likelihoods, templated on the scalar type so they
// evaluate over std::complex<double> for complex-step derivatives. Kept
// deliberately naive and independent of the production code paths.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "survmc/core.hpp"
#include "survmc/quadrature.hpp"

namespace survmc::oracle {

using std::exp;
using std::log;
using std::pow;

// Lanczos approximation (g = 7, 9 terms), valid for Re(x) > 0.
template <class T>
T lgamma_t(T x) {
  static const double c[9] = {0.99999999999980993,   676.5203681218851,
                              -1259.1392167224028,   771.32342877765313,
                              -176.61502916214059,   12.507343278686905,
                              -0.13857109526572012,  9.9843695780195716e-6,
                              1.5056327351493116e-7};
  T a = T(c[0]);
  for (int i = 1; i < 9; ++i) a += T(c[i]) / (x + T(i - 1));
  const T t = x + T(6.5);
  return T(0.5 * std::log(2.0 * 3.14159265358979323846)) +
         (x - T(0.5)) * log(t) - t + log(a);
}

template <class T>
T dot_row(const DesignMatrix& design, std::size_t i, const std::vector<T>& beta) {
  T s = T(0.0);
  for (std::size_t j = 0; j < beta.size(); ++j) s += T(design(i, j)) * beta[j];
  return s;
}

// One observation under a Weibull written in Gumbel form:
// z = alpha * (log t - mu), log S = -e^z, log f = log alpha - log t + z - e^z.
template <class T>
T gumbel_obs(const CensoredObservation& obs, T mu, T alpha) {
  auto log_S = [&](double c) { return -exp(alpha * (T(std::log(c)) - mu)); };
  switch (obs.kind) {
    case CensorKind::Exact: {
      const T z = alpha * (T(std::log(obs.t)) - mu);
      return log(alpha) - T(std::log(obs.t)) + z - exp(z);
    }
    case CensorKind::Right:
      return log_S(obs.c_lower);
    case CensorKind::Left:
      return log(T(1.0) - exp(log_S(obs.c_upper)));
    case CensorKind::Interval:
      return log(exp(log_S(obs.c_lower)) - exp(log_S(obs.c_upper)));
  }
  return T(0.0);
}

template <class T>
T aft(const std::vector<T>& beta, T alpha, const SurvivalDataset& data) {
  T ll = T(0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    ll += gumbel_obs(data.observations[i], dot_row(data.design, i, beta), alpha);
  }
  return ll;
}

// Piecewise-constant baseline cumulative hazard by a linear segment walk.
template <class T>
T pw_cumhaz(double t, const TimePartition& partition, const std::vector<T>& lambdas) {
  T H = T(0.0);
  for (std::size_t k = 0; k + 1 < partition.knots.size(); ++k) {
    const double lo = partition.knots[k];
    const double hi = partition.knots[k + 1];
    if (t <= lo) break;
    H += lambdas[k] * T(std::min(t, hi) - lo);
  }
  if (t > partition.knots.back()) {
    H += lambdas.back() * T(t - partition.knots.back());
  }
  return H;
}

template <class T>
T ph(const std::vector<T>& beta, const std::vector<T>& lambdas,
     const SurvivalDataset& data, const TimePartition& partition) {
  T ll = T(0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto& obs = data.observations[i];
    const T lp = dot_row(data.design, i, beta);
    auto log_S = [&](double c) {
      return c == 0.0 ? T(0.0) : -pw_cumhaz(c, partition, lambdas) * exp(lp);
    };
    switch (obs.kind) {
      case CensorKind::Exact: {
        std::size_t k = 0;
        while (k + 1 < partition.knots.size() && obs.t > partition.knots[k + 1]) ++k;
        ll += log(lambdas[std::min(k, lambdas.size() - 1)]) + lp + log_S(obs.t);
        break;
      }
      case CensorKind::Right:
        ll += log_S(obs.c_lower);
        break;
      case CensorKind::Left:
        ll += log(T(1.0) - exp(log_S(obs.c_upper)));
        break;
      case CensorKind::Interval:
        ll += log(exp(log_S(obs.c_lower)) - exp(log_S(obs.c_upper)));
        break;
    }
  }
  return ll;
}

template <class T>
T cure(const std::vector<T>& betaC, const std::vector<T>& betaU, T lambda,
       T alpha, const SurvivalDataset& data) {
  T ll = T(0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto& obs = data.observations[i];
    T lpC = betaC[0];
    for (std::size_t j = 0; j + 1 < betaC.size(); ++j)
      lpC += T(data.design(i, j)) * betaC[j + 1];
    const T eta = exp(lpC) / (T(1.0) + exp(lpC));  // cure probability
    const T lpU = dot_row(data.design, i, betaU);
    const double t = obs.kind == CensorKind::Exact ? obs.t : obs.c_lower;
    const T Su = exp(-lambda * pow(T(t), alpha) * exp(lpU));
    if (obs.kind == CensorKind::Exact) {
      const T h = lambda * alpha * pow(T(t), alpha - T(1.0)) * exp(lpU);
      ll += log((T(1.0) - eta) * h * Su);
    } else {
      ll += log(eta + (T(1.0) - eta) * Su);
    }
  }
  return ll;
}

template <class T>
T competing(const std::vector<std::vector<T>>& beta, const std::vector<T>& lambdas,
            const std::vector<T>& alphas, const SurvivalDataset& data) {
  T ll = T(0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto& obs = data.observations[i];
    const int cause = obs.kind == CensorKind::Exact ? obs.event_label : 0;
    const double t = obs.kind == CensorKind::Exact ? obs.t : obs.c_lower;
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      const T lp = dot_row(data.design, i, beta[k]);
      if (cause == static_cast<int>(k) + 1) {
        ll += log(lambdas[k] * alphas[k]) + (alphas[k] - T(1.0)) * T(std::log(t)) + lp;
      }
      ll -= lambdas[k] * pow(T(t), alphas[k]) * exp(lp);
    }
  }
  return ll;
}

template <class T>
T illness_death(const std::array<std::vector<T>, 3>& beta,
                const std::array<T, 3>& lambdas, const std::array<T, 3>& alphas,
                const SurvivalDataset& data) {
  T ll = T(0.0);
  for (std::size_t i = 0; i < data.multistate.size(); ++i) {
    const auto& rec = data.multistate[i];
    const double times[3] = {rec.t1, rec.t2, rec.t3};
    for (int k = 0; k < 3; ++k) {
      const T lp = dot_row(data.design, i, beta[k]);
      if (rec.event[k] == 1) {
        ll += log(lambdas[k] * alphas[k]) +
              (alphas[k] - T(1.0)) * T(std::log(times[k])) + lp;
      }
      ll -= lambdas[k] * pow(T(times[k]), alphas[k]) * exp(lp);
    }
  }
  return ll;
}

template <class T>
T frailty_mult(const std::vector<T>& beta, T alpha, T psi, const std::vector<T>& w,
               const SurvivalDataset& data) {
  T ll = T(0.0);
  for (const T& wg : w) {
    ll += psi * log(psi) - lgamma_t(psi) + (psi - T(1.0)) * log(wg) - psi * wg;
  }
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto& obs = data.observations[i];
    const T wg = w[static_cast<std::size_t>(data.group[i])];
    const T lp = dot_row(data.design, i, beta);
    const double t = obs.kind == CensorKind::Exact ? obs.t : obs.c_lower;
    if (obs.kind == CensorKind::Exact) {
      ll += log(wg) + lp + log(alpha) + (alpha - T(1.0)) * T(std::log(t));
    }
    ll -= wg * exp(lp) * pow(T(t), alpha);
  }
  return ll;
}

template <class T>
T frailty_add(const std::vector<T>& beta, T alpha, T tau, const std::vector<T>& b,
              const SurvivalDataset& data) {
  T ll = T(0.0);
  for (const T& bg : b) {
    ll += T(0.5) * log(tau) - T(0.5 * std::log(2.0 * 3.14159265358979323846)) -
          T(0.5) * tau * bg * bg;
  }
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto& obs = data.observations[i];
    const T bg = b[static_cast<std::size_t>(data.group[i])];
    const T lp = dot_row(data.design, i, beta) + bg;
    const double t = obs.kind == CensorKind::Exact ? obs.t : obs.c_lower;
    if (obs.kind == CensorKind::Exact) {
      ll += lp + log(alpha) + (alpha - T(1.0)) * T(std::log(t));
    }
    ll -= exp(lp) * pow(T(t), alpha);
  }
  return ll;
}

template <class T>
T joint(const std::vector<T>& betaL, const std::vector<T>& betaS, T gamma, T alpha,
        T sigma, T s11, T s12, T s22, const std::vector<std::array<T, 2>>& b,
        const SurvivalDataset& data, const GLRule& rule) {
  const double log2pi = std::log(2.0 * 3.14159265358979323846);
  const T det = s11 * s22 - s12 * s12;
  T ll = T(0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const T b0 = b[i][0], b1 = b[i][1];
    const T quad = (b0 * b0 * s22 - T(2.0) * b0 * b1 * s12 + b1 * b1 * s11) / det;
    ll += -T(log2pi) - T(0.5) * log(det) - T(0.5) * quad;

    for (const auto& pt : data.longitudinal[i]) {
      T mu = betaL[0] + b0 + (betaL[1] + b1) * T(pt.time);
      for (std::size_t j = 1; j < data.design.n_cols; ++j)
        mu += betaL[j + 1] * T(data.design(i, j));
      const T r = (T(pt.value) - mu) / sigma;
      ll += -T(0.5 * log2pi) - log(sigma) - T(0.5) * r * r;
    }

    const auto& obs = data.observations[i];
    const double Ti = obs.kind == CensorKind::Exact ? obs.t : obs.c_lower;
    const T lp = dot_row(data.design, i, betaS);
    auto hazard = [&](double u) {
      return alpha * pow(T(u), alpha - T(1.0)) *
             exp(lp + gamma * (b0 + b1 * T(u)));
    };
    T H = T(0.0);
    for (std::size_t k = 0; k < rule.order; ++k)
      H += T(rule.weights[k]) * hazard(0.5 * Ti * (rule.nodes[k] + 1.0));
    H *= T(0.5 * Ti);
    if (obs.kind == CensorKind::Exact) ll += log(hazard(Ti));
    ll -= H;
  }
  return ll;
}

}  // namespace survmc::oracle
