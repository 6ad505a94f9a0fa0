#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace survmc {

// Normal is parameterized by mean/precision, Gamma by shape/rate,
// Uniform uses bounds. InvWishart2 covers a 2x2 covariance block with
// scale v*I and df degrees of freedom.
enum class PriorKind { None, Normal, Gamma, Uniform, InvWishart2 };

struct Prior {
  PriorKind kind = PriorKind::None;
  double a = 0.0;
  double b = 0.0;

  static Prior normal(double mean, double precision) {
    return {PriorKind::Normal, mean, precision};
  }
  static Prior gamma(double shape, double rate) {
    return {PriorKind::Gamma, shape, rate};
  }
  static Prior uniform(double lo, double hi) {
    return {PriorKind::Uniform, lo, hi};
  }
  static Prior inv_wishart2(double v_diag, double df) {
    return {PriorKind::InvWishart2, v_diag, df};
  }
};

// Marginal log-density; -inf outside support. Not valid for InvWishart2.
double prior_logpdf(const Prior& prior, double x);

// Inverse-Wishart density on a 2x2 covariance (s11, s12, s22), scale v*I.
double inv_wishart2_logpdf(double s11, double s12, double s22, double v_diag,
                           double df);

double log_normal_pdf(double x, double mean, double sd);
double log_gamma_pdf(double x, double shape, double rate);

// Bivariate normal with zero mean and covariance (s11, s12, s22).
double log_mvn2_pdf(double b1, double b2, double s11, double s12, double s22);

}  // namespace survmc
