#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rdsdiag/error.hpp"
#include "rdsdiag/stats.hpp"

using namespace rdsdiag;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, int levels) {
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(std::uniform_int_distribution<int>(0, levels - 1)(rng)) * 0.5;
  return v;
}

}  // namespace

TEST_CASE("average ranks share ties") {
  CHECK(average_ranks({3, 1, 2}) == std::vector<double>{3, 1, 2});
  CHECK(average_ranks({5, 1, 5, 5}) == std::vector<double>{3, 1, 3, 3});
  CHECK(average_ranks({}).empty());
}

TEST_CASE("quantiles interpolate") {
  CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(quantile({4, 1, 3, 2}, 0.25) == 1.75);
  CHECK(median({7}) == 7);
  CHECK(mean({1, 2, 6}) == 3);
  CHECK_THROWS_AS(quantile({}, 0.5), Error);
}

TEST_CASE("spearman on small cases") {
  CHECK(spearman_rho({1, 2, 3}, {3, 2, 1}) == std::optional<double>(-1.0));
  CHECK(spearman_rho({1, 2, 3, 4}, {1, 2, 3, 4}) == std::optional<double>(1.0));
  CHECK_FALSE(spearman_rho({1, 1, 1}, {1, 2, 3}));
  const std::vector<double> test{1, 2, 2, 5}, retest{2, 1, 4, 4};
  CHECK(spearman_rho(test, retest) == oracle::spearman(test, retest));
  // ranks (1, 2.5, 2.5, 4) and (2, 1, 3.5, 3.5)
  CHECK(*spearman_rho(test, retest) == 0.5);
}

TEST_CASE("spearman is invariant under monotone transforms") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 200; ++rep) {
    const auto x = random_vector(rng, 2 + rep % 60, 9);
    const auto y = random_vector(rng, x.size(), 7);
    auto cubed = x;
    for (auto& v : cubed) v = v * v * v - 4.0;
    CHECK(spearman_rho(cubed, y) == spearman_rho(x, y));
  }
}

TEST_CASE("rank statistics match brute force") {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 2 + rng() % 499;
    const auto x = random_vector(rng, n, rep % 3 == 0 ? 4 : 1000);
    const auto y = random_vector(rng, n, rep % 5 == 0 ? 3 : 1000);
    const auto k = kendall_tau_b(x, y);
    const auto s = spearman_rho(x, y);
    CHECK(k == oracle::kendall(x, y));
    CHECK(s == oracle::spearman(x, y));
  }
}

TEST_CASE("kendall tau-b with ties") {
  CHECK(kendall_tau_b({1, 2, 3}, {1, 2, 3}) == std::optional<double>(1.0));
  CHECK(kendall_tau_b({1, 2, 3}, {3, 2, 1}) == std::optional<double>(-1.0));
  CHECK_FALSE(kendall_tau_b({2, 2}, {1, 3}));
  // pairs: x ties (1,2); y ties (3,4): S = 4, n0 = 6
  const auto t = kendall_tau_b({1, 1, 2, 3}, {1, 2, 3, 3});
  CHECK(*t == doctest::Approx(4.0 / 5.0).epsilon(1e-14));
}

TEST_CASE("theil-sen matches the all-pairs median") {
  std::mt19937_64 rng(29);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rng() % 199;
    const auto x = random_vector(rng, n, rep % 2 ? 6 : 400);
    const auto y = random_vector(rng, n, 300);
    const auto expect = oracle::theil_sen(x, y);
    if (!expect) {
      CHECK_THROWS_AS(theil_sen_slope(x, y), Error);
      continue;
    }
    CHECK(theil_sen_slope(x, y) == *expect);
  }
}

TEST_CASE("least squares") {
  const auto fit = least_squares({1, 2, 3, 4}, {0.1, 0.2, 0.3, 0.4});
  CHECK(fit.slope == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(0.0).epsilon(1e-12));
  // collinear: any two points give the slope
  const auto line = least_squares({-3, 1, 5, 9}, {11, 3, -5, -13});
  CHECK(line.slope == -2.0);
  CHECK(line.intercept == 5.0);
  CHECK_THROWS_AS(least_squares({2, 2}, {1, 3}), Error);

  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<long long> xi, yi;
    std::vector<double> xd, yd;
    for (int i = 0; i < 3 + rep % 40; ++i) {
      xi.push_back(static_cast<long long>(rng() % 50));
      yi.push_back(static_cast<long long>(rng() % 1000) - 500);
      xd.push_back(static_cast<double>(xi.back()));
      yd.push_back(static_cast<double>(yi.back()));
    }
    if (std::adjacent_find(xi.begin(), xi.end(), std::not_equal_to<>()) == xi.end()) continue;
    CHECK(least_squares(xd, yd).slope == doctest::Approx(oracle::ls_slope(xi, yi)).epsilon(1e-12));
  }
}

TEST_CASE("sign of") {
  CHECK(sign_of(0.0) == 0);
  CHECK(sign_of(-0.0) == 0);
  CHECK(sign_of(1e-300) == 1);
  CHECK(sign_of(-3) == -1);
}
