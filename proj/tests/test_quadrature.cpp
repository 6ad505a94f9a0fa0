#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "survmc/quadrature.hpp"

using namespace survmc;

TEST_CASE("simpson is exact on cubics") {
  auto cubic = [](double x) { return 3.0 * x * x * x - x * x + 2.0 * x - 5.0; };
  // antiderivative: 0.75 x^4 - x^3/3 + x^2 - 5x
  auto F = [](double x) {
    return 0.75 * x * x * x * x - x * x * x / 3.0 + x * x - 5.0 * x;
  };
  CHECK(simpson(cubic, -1.0, 2.0, 2) == doctest::Approx(F(2.0) - F(-1.0)).epsilon(1e-14));
  CHECK(simpson(cubic, 0.0, 10.0, 4) == doctest::Approx(F(10.0) - F(0.0)).epsilon(1e-14));
}

TEST_CASE("simpson converges on smooth integrands") {
  auto f = [](double x) { return std::exp(-x) * std::sin(x); };
  // int_0^pi e^{-x} sin x dx = (1 + e^{-pi})/2
  const double exact = 0.5 * (1.0 + std::exp(-3.14159265358979323846));
  CHECK(simpson(f, 0.0, 3.14159265358979323846, 512) ==
        doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("simpson rejects bad panel counts") {
  auto f = [](double x) { return x; };
  CHECK_THROWS_AS(simpson(f, 0.0, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(simpson(f, 0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("gauss-legendre structure") {
  for (std::size_t order : {2u, 5u, 15u, 40u}) {
    const GLRule rule = gauss_legendre(order);
    CHECK(rule.nodes.size() == order);
    CHECK(rule.weights.size() == order);
    double wsum = 0.0;
    for (std::size_t k = 0; k < order; ++k) {
      CHECK(rule.nodes[k] > -1.0);
      CHECK(rule.nodes[k] < 1.0);
      CHECK(rule.weights[k] > 0.0);
      if (k) CHECK(rule.nodes[k] > rule.nodes[k - 1]);
      // symmetry
      CHECK(rule.nodes[k] == doctest::Approx(-rule.nodes[order - 1 - k]).epsilon(1e-14));
      wsum += rule.weights[k];
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("order-15 gauss-legendre integrates monomials to degree 29") {
  const GLRule rule = gauss_legendre(15);
  for (int d = 0; d <= 29; ++d) {
    double got = 0.0;
    for (std::size_t k = 0; k < rule.order; ++k)
      got += rule.weights[k] * std::pow(rule.nodes[k], d);
    const double exact = d % 2 == 1 ? 0.0 : 2.0 / (d + 1.0);
    CHECK(std::abs(got - exact) < 1e-12);
  }
}

TEST_CASE("known gauss-legendre nodes") {
  // order 2: +-1/sqrt(3), weights 1
  const GLRule r2 = gauss_legendre(2);
  CHECK(r2.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(r2.weights[0] == doctest::Approx(1.0).epsilon(1e-14));
  // order 3: 0, +-sqrt(3/5); weights 8/9, 5/9
  const GLRule r3 = gauss_legendre(3);
  CHECK(r3.nodes[1] == doctest::Approx(0.0));
  CHECK(r3.nodes[2] == doctest::Approx(std::sqrt(0.6)).epsilon(1e-14));
  CHECK(r3.weights[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
  CHECK(r3.weights[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("adaptive kronrod handles an endpoint singularity") {
  auto f = [](double x) { return 1.0 / std::sqrt(x); };
  const QuadResult q = gauss_kronrod(f, 0.0, 1.0, 1e-8);
  CHECK(std::abs(q.value - 2.0) < 1e-6);
}

TEST_CASE("adaptive kronrod matches analytic integrals") {
  auto f = [](double x) { return std::exp(-x * x); };
  const double exact = 0.5 * std::sqrt(3.14159265358979323846) * std::erf(3.0);
  const QuadResult q = gauss_kronrod(f, 0.0, 3.0, 1e-12);
  CHECK(q.value == doctest::Approx(exact).epsilon(1e-12));
  CHECK(q.error_estimate >= 0.0);

  auto osc = [](double x) { return std::cos(50.0 * x); };
  const QuadResult q2 = gauss_kronrod(osc, 0.0, 1.0, 1e-10);
  CHECK(q2.value == doctest::Approx(std::sin(50.0) / 50.0).epsilon(1e-9));
}

TEST_CASE("kronrod reports failure when the depth budget is exhausted") {
  auto f = [](double x) { return 1.0 / std::sqrt(x); };
  CHECK_THROWS_AS(gauss_kronrod(f, 0.0, 1.0, 1e-10, 2), std::runtime_error);
}

TEST_CASE("degenerate interval integrates to zero") {
  auto f = [](double x) { return std::exp(x); };
  CHECK(gauss_kronrod(f, 1.0, 1.0, 1e-8).value == doctest::Approx(0.0));
}
