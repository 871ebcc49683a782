#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "rdsdiag/error.hpp"
#include "rdsdiag/estimators.hpp"

using namespace rdsdiag;

namespace {

std::vector<Member> members(std::initializer_list<std::pair<double, bool>> list) {
  std::vector<Member> out;
  for (auto [d, t] : list) out.push_back({t, d});
  return out;
}

std::vector<Observation> observations(const std::vector<Member>& ms) {
  std::vector<Observation> out;
  for (std::size_t i = 0; i < ms.size(); ++i) out.push_back({i, ms[i].has_trait, static_cast<int>(ms[i].degree)});
  return out;
}

}  // namespace

TEST_CASE("vh estimate on hand fixtures") {
  CHECK(vh_estimate(members({{2, true}, {2, true}, {2, true}, {2, false}, {2, false}, {2, false}})) == 0.5);
  CHECK(vh_estimate(members({{1, true}, {4, true}, {2, false}, {4, false}})) == doctest::Approx(0.625).epsilon(1e-12));
  CHECK(vh_estimate(members({{1, false}, {3, false}})) == 0.0);
  CHECK(vh_estimate(members({{1, true}, {3, true}})) == 1.0);
  CHECK_THROWS_AS(vh_estimate({}), Error);
  CHECK_THROWS_AS(vh_estimate(members({{0, true}})), Error);
}

TEST_CASE("vh is scale free in degrees") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> deg(1, 40);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<Member> m;
    for (int i = 0; i < 30; ++i) m.push_back({rng() % 3 == 0, static_cast<double>(deg(rng))});
    const double base = vh_estimate(m);
    for (double c : {2.0, 0.25, 1024.0}) {
      auto scaled = m;
      for (auto& x : scaled) x.degree *= c;
      CHECK(vh_estimate(scaled) == base);
    }
    auto scaled = m;
    for (auto& x : scaled) x.degree *= 3.7;
    CHECK(vh_estimate(scaled) == doctest::Approx(base).epsilon(1e-14));
  }
}

TEST_CASE("cumulative estimates") {
  const auto ds = fx::dataset({{"S", ""}, {"a", "S", 1, true}, {"b", "S", 1, false}, {"c", "a", 1, false}, {"d", "a", 1, true}});
  const auto f = RecruitmentForest::build(ds);
  const auto s = cumulative_estimates(ds, f, ds.selector("t"));
  REQUIRE(s.values.size() == 4);
  CHECK(s.values[0] == 1.0);
  CHECK(s.values[1] == 0.5);
  CHECK(s.values[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(s.values[3] == 0.5);
  CHECK(s.orders == std::vector<int>{2, 3, 4, 5});
  CHECK(s.final_value() == 0.5);

  const auto all = fx::dataset({{"S", ""}, {"a", "S", 2, true}, {"b", "S", 5, true}});
  for (double v : cumulative_estimates(all, RecruitmentForest::build(all), all.selector("t")).values) CHECK(v == 1.0);

  const auto seeds = fx::dataset({{"S", ""}, {"T", ""}});
  const auto empty = cumulative_estimates(seeds, RecruitmentForest::build(seeds), seeds.selector("t"));
  CHECK(empty.empty());
  try {
    empty.final_value();
    FAIL("expected EmptySample");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptySample);
  }
}

TEST_CASE("included observations count exclusions") {
  const auto ds = fx::dataset({{"S", ""}, {"a", "S", 0, true}, {"b", "S", std::nullopt, true}, {"c", "S", 2, std::nullopt}, {"d", "S", 3, false}});
  const auto inc = included_observations(ds, ds.selector("t"));
  CHECK(inc.seeds == 1);
  CHECK(inc.zero_degree == 1);
  CHECK(inc.missing_degree == 1);
  CHECK(inc.missing_trait == 1);
  REQUIRE(inc.observations.size() == 1);
  CHECK(inc.observations[0].respondent == 4);
}

TEST_CASE("final cumulative value equals the full-sample estimate") {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<fx::Row> rows{{"S", ""}};
    for (int i = 0; i < 5 + rep % 60; ++i) {
      rows.push_back({"r" + std::to_string(i), rows[rng() % rows.size()].id, static_cast<int>(1 + rng() % 12),
                      rng() % 2 == 0});
    }
    const auto ds = fx::dataset(rows);
    const auto s = cumulative_estimates(ds, RecruitmentForest::build(ds), ds.selector("t"));
    const auto inc = included_observations(ds, ds.selector("t"));
    CHECK(s.final_value() == vh_estimate(to_members(inc.observations)));
  }
}

TEST_CASE("per-tree estimates") {
  const auto two = fx::dataset({{"A", ""}, {"B", ""}, {"a1", "A", 1, true}, {"b1", "B", 1, false}, {"a2", "A", 1, true}, {"b2", "B", 1, false}});
  const auto f = RecruitmentForest::build(two);
  const auto est = per_tree_estimates(two, f, two.selector("t"));
  REQUIRE(est.size() == 2);
  CHECK(est[0].estimate == 1.0);
  CHECK(est[0].n == 2);
  CHECK(est[1].estimate == 0.0);

  const auto one = fx::dataset({{"A", ""}, {"a", "A", 3, true}, {"b", "A", 1, false}, {"c", "b", 2, true}});
  const auto single = per_tree_estimates(one, RecruitmentForest::build(one), one.selector("t"));
  REQUIRE(single.size() == 1);
  CHECK(single[0].estimate == cumulative_estimates(one, RecruitmentForest::build(one), one.selector("t")).final_value());

  const auto missing = fx::dataset({{"A", ""}, {"B", ""}, {"a", "A", 1, true}, {"b", "B", 1, std::nullopt}});
  const auto m = per_tree_estimates(missing, RecruitmentForest::build(missing), missing.selector("t"));
  REQUIRE(m.size() == 1);
  CHECK(m[0].root == 0);
}

TEST_CASE("pooled estimate lies between tree estimates at equal degrees") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<fx::Row> rows{{"S0", ""}, {"S1", ""}, {"S2", ""}};
    for (int i = 0; i < 30; ++i) rows.push_back({"r" + std::to_string(i), rows[rng() % rows.size()].id, 3, rng() % 3 == 0});
    const auto ds = fx::dataset(rows);
    const auto f = RecruitmentForest::build(ds);
    const auto est = per_tree_estimates(ds, f, ds.selector("t"));
    double lo = 1, hi = 0;
    for (const auto& e : est) {
      lo = std::min(lo, e.estimate);
      hi = std::max(hi, e.estimate);
    }
    const double pooled = cumulative_estimates(ds, f, ds.selector("t")).final_value();
    CHECK(pooled >= lo - 1e-15);
    CHECK(pooled <= hi + 1e-15);
  }
}

TEST_CASE("successive sampling limits") {
  const auto fixture = members({{1, true}, {4, true}, {2, false}, {4, false}});
  const auto obs = observations(fixture);
  SSConfig cfg;
  cfg.population_size = 4000;
  const auto far = ss_estimate(obs, cfg);
  CHECK(std::fabs(far.estimate - 0.625) < 0.005);

  cfg.population_size = 4;
  CHECK(ss_estimate(obs, cfg).estimate == doctest::Approx(0.5).epsilon(1e-12));

  const auto equal = observations(members({{3, true}, {3, false}, {3, false}, {3, true}, {3, true}}));
  for (double n : {5.0, 6.0, 50.0, 5000.0}) {
    cfg.population_size = n;
    CHECK(ss_estimate(equal, cfg).estimate == doctest::Approx(0.6).epsilon(1e-12));
  }

  cfg.population_size = 3;
  try {
    ss_estimate(obs, cfg);
    FAIL("expected PopulationTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PopulationTooSmall);
  }
}

TEST_CASE("successive sampling is deterministic per seed") {
  const auto obs = observations(members({{1, true}, {4, true}, {2, false}, {4, false}, {7, true}, {2, false}}));
  SSConfig cfg;
  cfg.population_size = 9;
  const auto a = ss_estimate(obs, cfg);
  const auto b = ss_estimate(obs, cfg);
  CHECK(a.estimate == b.estimate);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("ss/vh table") {
  const auto ds = fx::dataset({{"S", ""}, {"a", "S", 2, true}, {"b", "S", 2, false}, {"c", "a", 2, false}, {"d", "a", 2, true}});
  SSConfig small;
  small.population_size = 5;
  SSConfig big;
  big.population_size = 400;
  const auto t = ss_vh_table(ds, {ds.selector("t")}, {small, big});
  REQUIRE(t.rows.size() == 1);
  for (const auto& c : t.rows[0].scenarios) CHECK(std::fabs(c.difference) < 1e-12);
  CHECK_FALSE(t.rows[0].flagged);
  CHECK(ss_vh_csv(t).rfind("trait,VH,N=5,N=400,", 0) == 0);

  CHECK(ss_vh_table(ds, {}, {small}).rows.empty());
}

TEST_CASE("ss/vh table flags strong degree-trait correlation near census") {
  std::vector<fx::Row> rows{{"S", ""}};
  for (int i = 0; i < 40; ++i) {
    const bool t = i % 2 == 0;
    rows.push_back({"r" + std::to_string(i), "S", t ? 20 : 2, t});
  }
  const auto ds = fx::dataset(rows);
  SSConfig near;
  near.population_size = 48;
  const auto t = ss_vh_table(ds, {ds.selector("t")}, {near});
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].flagged);
  CHECK(t.rows[0].max_abs_difference > 0.01);
}
