#include "survmc/priors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace survmc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;
}  // namespace

double log_normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * kLog2Pi - std::log(sd) - 0.5 * z * z;
}

double log_gamma_pdf(double x, double shape, double rate) {
  if (x <= 0.0) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) -
         rate * x;
}

double prior_logpdf(const Prior& prior, double x) {
  switch (prior.kind) {
    case PriorKind::None:
      return 0.0;
    case PriorKind::Normal:
      return log_normal_pdf(x, prior.a, 1.0 / std::sqrt(prior.b));
    case PriorKind::Gamma:
      return log_gamma_pdf(x, prior.a, prior.b);
    case PriorKind::Uniform:
      if (x <= prior.a || x >= prior.b) return kNegInf;
      return -std::log(prior.b - prior.a);
    case PriorKind::InvWishart2:
      throw std::logic_error("InvWishart prior is not a scalar marginal");
  }
  throw std::logic_error("unreachable prior kind");
}

double inv_wishart2_logpdf(double s11, double s12, double s22, double v_diag,
                           double df) {
  const double det = s11 * s22 - s12 * s12;
  if (s11 <= 0.0 || det <= 0.0) return kNegInf;
  const int p = 2;
  // tr(V Sigma^{-1}) with V = v*I
  const double trace = v_diag * (s11 + s22) / det;
  const double log_det_v = p * std::log(v_diag);
  const double lgamma2 =
      0.5 * std::log(std::numbers::pi) + std::lgamma(0.5 * df) +
      std::lgamma(0.5 * df - 0.5);
  return 0.5 * df * log_det_v - 0.5 * df * p * std::numbers::ln2 - lgamma2 -
         0.5 * (df + p + 1.0) * std::log(det) - 0.5 * trace;
}

double log_mvn2_pdf(double b1, double b2, double s11, double s12, double s22) {
  const double det = s11 * s22 - s12 * s12;
  if (det <= 0.0 || s11 <= 0.0) return kNegInf;
  const double q = (s22 * b1 * b1 - 2.0 * s12 * b1 * b2 + s11 * b2 * b2) / det;
  return -kLog2Pi - 0.5 * std::log(det) - 0.5 * q;
}

}  // namespace survmc
