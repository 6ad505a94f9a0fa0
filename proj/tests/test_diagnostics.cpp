#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "survmc/diagnostics.hpp"

using namespace survmc;

TEST_CASE("type-7 quantiles match the interpolation definition") {
  std::vector<double> v = {3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0};
  // sorted: 1 1 2 3 4 5 6 9
  CHECK(quantile_type7(v, 0.0) == 1.0);
  CHECK(quantile_type7(v, 1.0) == 9.0);
  CHECK(quantile_type7(v, 0.5) == doctest::Approx(3.5));
  // h = 0.25 * 7 = 1.75 -> x[1] + 0.75*(x[2]-x[1]) = 1 + 0.75 = 1.75
  CHECK(quantile_type7(v, 0.25) == doctest::Approx(1.75));
  CHECK_THROWS_AS(quantile_type7({}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(quantile_type7(v, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(quantile_type7(v, 1.1), std::invalid_argument);
}

TEST_CASE("psrf formula on a hand-checked case") {
  // two chains of length 4
  const std::vector<std::vector<double>> chains = {{1.0, 2.0, 3.0, 4.0},
                                                   {2.0, 3.0, 4.0, 7.0}};
  // means 2.5 and 4, variances 5/3 and 14/3, W = 19/6
  // B = n * var(means) = 4 * 1.125 = 4.5
  // var_hat = (3/4)*W + B/4 = 19/8 + 9/8 = 3.5, psrf = sqrt(3.5/(19/6))
  const double expected = std::sqrt(3.5 / (19.0 / 6.0));
  CHECK(gelman_rubin_psrf(chains) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("psrf near one for identically distributed chains, large otherwise") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> norm(0.0, 1.0);
  std::vector<std::vector<double>> good(3, std::vector<double>(4000));
  for (auto& chain : good)
    for (auto& x : chain) x = norm(rng);
  CHECK(gelman_rubin_psrf(good) < 1.01);

  std::vector<std::vector<double>> bad = good;
  for (auto& x : bad[0]) x += 5.0;  // displaced chain
  CHECK(gelman_rubin_psrf(bad) > 2.0);
}

TEST_CASE("psrf input validation") {
  CHECK_THROWS_AS(gelman_rubin_psrf({{1.0, 2.0, 3.0, 4.0}}), std::invalid_argument);
  CHECK_THROWS_AS(gelman_rubin_psrf({{1.0, 2.0}, {1.0, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(gelman_rubin_psrf({{1.0, 2.0, 3.0, 4.0}, {1.0, 2.0, 3.0}}),
                  std::invalid_argument);
}

TEST_CASE("spectrum0 approximates the variance of white noise") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> norm(0.0, 2.0);
  std::vector<double> series(20000);
  for (auto& x : series) x = norm(rng);
  CHECK(spectrum0(series) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("spectrum0 inflates for positively correlated series") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> norm(0.0, 1.0);
  const double phi = 0.7;
  std::vector<double> series(20000);
  double x = 0.0;
  for (auto& s : series) {
    x = phi * x + norm(rng);
    s = x;
  }
  // AR(1): spectral density at zero = sigma^2 / (1-phi)^2
  const double expected = 1.0 / ((1.0 - phi) * (1.0 - phi));
  CHECK(spectrum0(series) == doctest::Approx(expected).epsilon(0.25));
}

TEST_CASE("spectrum0 falls back gracefully on short series") {
  const std::vector<double> tiny = {1.0, 2.0, 1.5, 2.5, 1.2, 2.2};
  CHECK(spectrum0(tiny) >= 0.0);
}

TEST_CASE("summary table values on a fixed sample") {
  PosteriorSamples samples;
  samples.param_names = {"theta"};
  samples.draws = {{{1.0}, {2.0}, {3.0}, {4.0}}, {{-1.0}, {0.0}, {5.0}, {6.0}}};
  const SummaryTable table = summarize(samples);
  const auto& row = table.row("theta");
  CHECK(row.mean == doctest::Approx(2.5));
  // pooled: -1 0 1 2 3 4 5 6, sample sd
  CHECK(row.sd == doctest::Approx(std::sqrt(42.0 / 7.0)));
  CHECK(row.naive_se == doctest::Approx(row.sd / std::sqrt(8.0)));
  CHECK(row.q50 == doctest::Approx(2.5));
  CHECK(row.prob_positive == doctest::Approx(6.0 / 8.0));
  CHECK_THROWS_AS(table.row("missing"), std::invalid_argument);
}

TEST_CASE("merge chains concatenates rows in chain order") {
  PosteriorSamples samples;
  samples.param_names = {"a", "b"};
  samples.draws = {{{1.0, 2.0}}, {{3.0, 4.0}}};
  const auto merged = merge_chains(samples);
  REQUIRE(merged.size() == 2);
  CHECK(merged[0] == std::vector<double>{1.0, 2.0});
  CHECK(merged[1] == std::vector<double>{3.0, 4.0});
}
