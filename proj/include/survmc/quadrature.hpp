#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace survmc {

struct GLRule {
  std::size_t order = 0;
  std::vector<double> nodes;    // in (-1, 1), increasing
  std::vector<double> weights;  // positive, sum to 2
};

// Composite Simpson with n_panels even subintervals.
double simpson(const std::function<double(double)>& f, double a, double b,
               std::size_t n_panels);

// Nodes/weights via Newton iteration on the Legendre polynomial.
GLRule gauss_legendre(std::size_t order);

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

// Adaptive bisection with the 15-point Kronrod / 7-point Gauss pair.
QuadResult gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                         double rel_tol, std::size_t max_depth = 64);

}  // namespace survmc
