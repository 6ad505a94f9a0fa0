#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "survmc/quantities.hpp"

using namespace survmc;

namespace {

std::vector<std::vector<double>> random_beta_draws(std::size_t n_draws, std::size_t p,
                                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> norm(0.0, 0.7);
  std::vector<std::vector<double>> out(n_draws, std::vector<double>(p));
  for (auto& row : out)
    for (auto& b : row) b = norm(rng);
  return out;
}

std::vector<IllnessDeathParams> random_illness_draws(std::size_t n_draws,
                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lam(0.2, 1.0);
  std::uniform_real_distribution<double> shape(0.7, 1.8);
  std::normal_distribution<double> norm(0.0, 0.4);
  std::vector<IllnessDeathParams> out(n_draws);
  for (auto& d : out) {
    for (int k = 0; k < 3; ++k) {
      d.beta[k] = {norm(rng)};
      d.lambdas[k] = lam(rng);
      d.alphas[k] = shape(rng);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("contrast quantities depend only on the covariate difference") {
  const auto draws = random_beta_draws(50, 3, 1);
  const std::vector<double> x1 = {1.0, 0.0, 2.0};
  const std::vector<double> x2 = {0.0, 1.0, 2.0};

  const auto same = hazard_ratio(x1, x1, draws);
  for (double v : same) CHECK(v == doctest::Approx(1.0));

  const auto base = relative_median(x1, x2, draws);
  std::vector<double> x1s = x1, x2s = x2;
  for (std::size_t j = 0; j < 3; ++j) {
    x1s[j] += 5.0;
    x2s[j] += 5.0;
  }
  const auto shifted = relative_median(x1s, x2s, draws);
  for (std::size_t i = 0; i < base.size(); ++i)
    CHECK(shifted[i] == doctest::Approx(base[i]).epsilon(1e-10));

  // reciprocal identity per draw
  const auto fwd = hazard_ratio(x1, x2, draws);
  const auto rev = hazard_ratio(x2, x1, draws);
  for (std::size_t i = 0; i < fwd.size(); ++i)
    CHECK(fwd[i] * rev[i] == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(hazard_ratio(x1, std::vector<double>{1.0}, draws),
                  std::invalid_argument);
}

TEST_CASE("cure fraction is an inverse logit, stable at extremes") {
  const std::vector<std::vector<double>> zero = {{0.0, 0.0}};
  CHECK(cure_fraction(std::vector<double>{1.0, 0.5}, zero)[0] == doctest::Approx(0.5));

  const std::vector<std::vector<double>> big = {{1000.0, 0.0}};
  const std::vector<std::vector<double>> small = {{-1000.0, 0.0}};
  const std::vector<double> x = {1.0, 0.0};
  CHECK(cure_fraction(x, big)[0] == doctest::Approx(1.0));
  CHECK(cure_fraction(x, small)[0] == doctest::Approx(0.0));

  // monotone in the intercept draw-wise
  auto draws = random_beta_draws(30, 2, 2);
  std::sort(draws.begin(), draws.end(),
            [](const auto& a, const auto& b) { return a[0] < b[0]; });
  const std::vector<double> x0 = {1.0, 0.3};
  const auto eta = cure_fraction(x0, draws);
  for (std::size_t i = 1; i < eta.size(); ++i) {
    const double lp_prev = draws[i - 1][0] + 0.3 * draws[i - 1][1];
    const double lp_cur = draws[i][0] + 0.3 * draws[i][1];
    if (lp_cur > lp_prev) CHECK(eta[i] > eta[i - 1]);
  }
}

TEST_CASE("uncured survival curve basics") {
  std::vector<CureParams> draws;
  draws.push_back(CureParams{{0.0}, {0.0}, 1.0, 1.0});
  const std::vector<double> times = {0.0, 1.0, 2.0};
  const CurveGrid grid = uncured_survival_curve(times, draws, std::vector<double>{0.0});
  CHECK(grid.values[0] == doctest::Approx(1.0));
  CHECK(grid.values[1] == doctest::Approx(std::exp(-1.0)));
  CHECK(grid.values[2] == doctest::Approx(std::exp(-2.0)));

  // posterior-mean curve is nonincreasing
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  draws.clear();
  for (int i = 0; i < 40; ++i)
    draws.push_back(CureParams{{0.0}, {unif(rng) - 1.0}, unif(rng), unif(rng)});
  std::vector<double> grid_times;
  for (int i = 0; i <= 20; ++i) grid_times.push_back(0.2 * i);
  const CurveGrid g = uncured_survival_curve(grid_times, draws, std::vector<double>{1.0});
  for (std::size_t i = 1; i < g.values.size(); ++i)
    CHECK(g.values[i] <= g.values[i - 1] + 1e-12);
}

TEST_CASE("single-cause cumulative incidence matches the closed form") {
  std::vector<CompetingRisksParams> draws;
  draws.push_back(CompetingRisksParams{{{0.4}}, {0.7}, {1.3}});
  draws.push_back(CompetingRisksParams{{{-0.2}}, {1.1}, {0.9}});
  const std::vector<double> x = {0.5};
  for (double t : {0.5, 1.0, 2.5}) {
    double closed = 0.0;
    for (const auto& d : draws) {
      const double rate = d.lambdas[0] * std::exp(d.beta[0][0] * x[0]);
      closed += 1.0 - std::exp(-rate * std::pow(t, d.alphas[0]));
    }
    closed /= 2.0;
    const double got = cif(1, t, x, draws);
    CHECK(std::abs(got - closed) / closed < 1e-6);
  }
  CHECK(cif(1, 0.0, x, draws) == 0.0);
  CHECK_THROWS_AS(cif(2, 1.0, x, draws), std::invalid_argument);
  CHECK_THROWS_AS(cif(1, -1.0, x, draws), std::invalid_argument);
}

TEST_CASE("cause-specific incidences and overall survival sum to one") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lam(0.3, 1.2);
  std::uniform_real_distribution<double> shape(0.8, 1.6);
  std::normal_distribution<double> norm(0.0, 0.3);
  std::vector<CompetingRisksParams> draws;
  for (int i = 0; i < 20; ++i) {
    CompetingRisksParams d;
    for (int k = 0; k < 3; ++k) {
      d.beta.push_back({norm(rng)});
      d.lambdas.push_back(lam(rng));
      d.alphas.push_back(shape(rng));
    }
    draws.push_back(d);
  }
  const std::vector<double> x = {0.4};
  for (double t : {0.3, 1.0, 2.0}) {
    double total = 0.0;
    for (std::size_t k = 1; k <= 3; ++k) total += cif(k, t, x, draws);
    double surv = 0.0;
    for (const auto& d : draws) {
      double H = 0.0;
      for (int k = 0; k < 3; ++k)
        H += d.lambdas[static_cast<std::size_t>(k)] *
             std::exp(d.beta[static_cast<std::size_t>(k)][0] * x[0]) *
             std::pow(t, d.alphas[static_cast<std::size_t>(k)]);
      surv += std::exp(-H);
    }
    surv /= static_cast<double>(draws.size());
    CHECK(total + surv == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("p11 closed form and monotonicity") {
  const auto draws = random_illness_draws(20, 6);
  const std::vector<double> x = {0.2};
  CHECK(p11(1.0, 1.0, draws, x) == doctest::Approx(1.0));

  double prev = 1.0;
  for (double t : {1.2, 1.6, 2.4, 4.0}) {
    const double v = p11(1.0, t, draws, x);
    CHECK(v <= prev + 1e-12);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    prev = v;
  }
  CHECK_THROWS_AS(p11(2.0, 1.0, draws, x), std::invalid_argument);
}

TEST_CASE("p22 reduces to a closed form with an exponential sojourn hazard") {
  // alpha_23 = 1: the sojourn survival factor is exp(-r23 (t-s)) regardless of
  // the illness time, so the truncated mixture integrates out exactly.
  std::vector<IllnessDeathParams> draws = random_illness_draws(10, 8);
  for (auto& d : draws) d.alphas[2] = 1.0;
  const std::vector<double> x = {-0.3};
  const double s = 1.5, t = 2.75;
  double closed = 0.0;
  for (const auto& d : draws) {
    const double r23 = d.lambdas[2] * std::exp(d.beta[2][0] * x[0]);
    closed += std::exp(-r23 * (t - s));
  }
  closed /= static_cast<double>(draws.size());
  CHECK(p22(s, t, draws, x) == doctest::Approx(closed).epsilon(1e-7));
  CHECK(p22(s, s, draws, x) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(p22(0.0, 1.0, draws, x), std::invalid_argument);
}

TEST_CASE("p12 against a brute-force trapezoid integral") {
  const auto draws = random_illness_draws(5, 12);
  const std::vector<double> x = {0.1};
  const double s = 0.8, t = 2.2;
  const double got = p12(s, t, draws, x);
  CHECK(p12(s, s, draws, x) == 0.0);
  CHECK(got >= 0.0);
  CHECK(got <= 1.0);

  double brute = 0.0;
  const std::size_t n = 10000;
  for (const auto& d : draws) {
    double r[3], a[3];
    for (int k = 0; k < 3; ++k) {
      r[k] = d.lambdas[k] * std::exp(d.beta[k][0] * x[0]);
      a[k] = d.alphas[k];
    }
    auto f = [&](double u) {
      const double h12 = r[0] * a[0] * std::pow(u, a[0] - 1.0);
      const double H1 = r[0] * (std::pow(u, a[0]) - std::pow(s, a[0])) +
                        r[1] * (std::pow(u, a[1]) - std::pow(s, a[1]));
      return h12 * std::exp(-H1 - r[2] * std::pow(t - u, a[2]));
    };
    const double h = (t - s) / static_cast<double>(n);
    double acc = 0.5 * (f(s) + f(t));
    for (std::size_t i = 1; i < n; ++i) acc += f(s + h * static_cast<double>(i));
    brute += acc * h;
  }
  brute /= static_cast<double>(draws.size());
  CHECK(std::abs(got - brute) / brute < 1e-4);
}

TEST_CASE("transition complements") {
  const auto r = p13_p23(0.6, 0.25, 0.8);
  CHECK(r.p13 == doctest::Approx(0.15));
  CHECK(r.p23 == doctest::Approx(0.2));
  CHECK(0.6 + 0.25 + r.p13 == doctest::Approx(1.0));

  CHECK(p13_p23(1.0, 0.0, 1.0).p13 == 0.0);
  CHECK(p13_p23(1.0, 0.0, 1.0).p23 == 0.0);
  // tiny negative from quadrature noise is clamped
  CHECK(p13_p23(0.7, 0.3 + 5e-9, 0.5).p13 == 0.0);
  // but a real violation is an error
  CHECK_THROWS_AS(p13_p23(0.8, 0.3, 0.5), std::runtime_error);
  CHECK_THROWS_AS(p13_p23(1.2, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("frailty survival curve") {
  std::vector<FrailtyParams> draws;
  FrailtyParams d;
  d.beta = {std::log(0.8), 0.5};  // lambda = 0.8
  d.alpha = 1.2;
  d.psi = 2.0;
  d.w = {1.0, 2.0};
  draws.push_back(d);

  const std::vector<double> times = {0.0, 1.0, 2.0};
  const std::vector<double> sex = {1.0};
  const CurveGrid g0 = frailty_survival_curve(times, draws, 0, sex);
  CHECK(g0.values[0] == doctest::Approx(1.0));
  // w = 1: population curve exp(-0.8 e^{0.5} t^{1.2})
  const double rate = 0.8 * std::exp(0.5);
  CHECK(g0.values[1] == doctest::Approx(std::exp(-rate)));
  CHECK(g0.values[2] == doctest::Approx(std::exp(-rate * std::pow(2.0, 1.2))));

  const CurveGrid g1 = frailty_survival_curve(times, draws, 1, sex);
  CHECK(g1.values[1] < g0.values[1]);  // higher frailty dies faster
  CHECK_THROWS_AS(frailty_survival_curve(times, draws, 5, sex), std::invalid_argument);
}

TEST_CASE("draw subsampling is seeded and bounded") {
  const auto a = subsample_indices(1000, 200, 31);
  const auto b = subsample_indices(1000, 200, 31);
  const auto c = subsample_indices(1000, 200, 32);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a.size() == 200);
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] > a[i - 1]);
  CHECK(subsample_indices(50, 200, 1).size() == 50);
}
