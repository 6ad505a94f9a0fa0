#include "survmc/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>

namespace survmc {

double simpson(const std::function<double(double)>& f, double a, double b,
               std::size_t n_panels) {
  if (a > b) throw std::invalid_argument("simpson: a > b");
  if (n_panels == 0 || n_panels % 2 != 0)
    throw std::invalid_argument("simpson: panel count must be positive and even");
  if (a == b) return 0.0;
  const double h = (b - a) / static_cast<double>(n_panels);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < n_panels; ++i)
    s += f(a + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

GLRule gauss_legendre(std::size_t order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  GLRule rule;
  rule.order = order;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const std::size_t m = (order + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    // Chebyshev-based starting guess, then Newton on P_order.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(order) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t j = 0; j < order; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * static_cast<double>(j) + 1.0) * x * p1 -
              static_cast<double>(j) * p2) /
             (static_cast<double>(j) + 1.0);
      }
      dp = static_cast<double>(order) * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

namespace {

// QUADPACK QK15 pair: 15 Kronrod abscissae embedding the 7-point Gauss rule.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  std::size_t depth;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment eval_qk15(const std::function<double(double)>& f, double a, double b,
                  std::size_t depth) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  for (int i = 0; i < 7; ++i) {
    const double x = h * kXgk[i];
    const double fsum = f(c - x) + f(c + x);
    res_k += kWgk[i] * fsum;
    if (i % 2 == 1) res_g += kWg[i / 2] * fsum;
  }
  return {a, b, res_k * h, std::abs((res_k - res_g) * h), depth};
}

}  // namespace

QuadResult gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                         double rel_tol, std::size_t max_depth) {
  if (a > b) throw std::invalid_argument("gauss_kronrod: a > b");
  if (a == b) return {0.0, 0.0};
  std::priority_queue<Segment> queue;
  queue.push(eval_qk15(f, a, b, 0));
  double total = queue.top().value;
  double total_err = queue.top().error;
  const double abs_floor = 1e-300;
  while (total_err > rel_tol * std::max(std::abs(total), abs_floor)) {
    Segment worst = queue.top();
    if (worst.depth >= max_depth)
      throw std::runtime_error(
          "gauss_kronrod: subdivision limit exceeded; partial estimate " +
          std::to_string(total) + " +/- " + std::to_string(total_err));
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Segment left = eval_qk15(f, worst.a, mid, worst.depth + 1);
    Segment right = eval_qk15(f, mid, worst.b, worst.depth + 1);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }
  return {total, total_err};
}

}  // namespace survmc
