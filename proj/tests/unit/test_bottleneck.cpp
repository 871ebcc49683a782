#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "rdsdiag/bottleneck.hpp"
#include "rdsdiag/error.hpp"

using namespace rdsdiag;

namespace {

// Two seeds, each with n unit-degree recruits; tree A all positive when
// aligned, otherwise labels alternate.
StudyDataset two_trees(int n, bool aligned) {
  std::vector<fx::Row> rows{{"A", ""}, {"B", ""}};
  for (int i = 0; i < n; ++i) {
    const bool t_a = aligned ? true : i % 2 == 0;
    const bool t_b = aligned ? false : i % 2 == 1;
    rows.push_back({"a" + std::to_string(i), "A", 1, t_a});
    rows.push_back({"b" + std::to_string(i), "B", 1, t_b});
  }
  return fx::dataset(rows);
}

BottleneckConfig cfg(std::size_t reps, double threshold = 0.9, std::uint64_t seed = 1) {
  BottleneckConfig c;
  c.replicates = reps;
  c.threshold = threshold;
  c.rng_seed = seed;
  return c;
}

}  // namespace

TEST_CASE("wsd on hand fixtures") {
  CHECK(wsd({{0, 0.2, 10}, {1, 0.8, 10}}, 0.5) == doctest::Approx(1.8).epsilon(1e-12));
  CHECK(wsd({{0, 0.4, 7}}, 0.4) == 0.0);
  CHECK(wsd({{0, 0.3, 7}, {1, 0.3, 2}}, 0.3) == 0.0);
  CHECK(wsd({}, 0.3) == 0.0);
}

TEST_CASE("wsd ignores tree labels and empty trees") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<TreeEstimate> trees;
    for (std::size_t k = 0; k < 6; ++k) trees.push_back({k, u(rng), 1 + rng() % 20});
    const double overall = u(rng);
    const double base = wsd(trees, overall);
    auto relabeled = trees;
    std::reverse(relabeled.begin(), relabeled.end());
    for (std::size_t k = 0; k < relabeled.size(); ++k) relabeled[k].root = 100 + k;
    CHECK(wsd(relabeled, overall) == doctest::Approx(base).epsilon(1e-14));
    auto padded = trees;
    padded.push_back({99, u(rng), 0});
    CHECK(wsd(padded, overall) == base);
  }
}

TEST_CASE("constant trait gives zero statistic") {
  std::vector<fx::Row> rows{{"A", ""}, {"B", ""}};
  for (int i = 0; i < 10; ++i) rows.push_back({"r" + std::to_string(i), i % 2 ? "A" : "B", 1 + i % 3, true});
  const auto ds = fx::dataset(rows);
  const auto r = wsd_permutation_test(ds, RecruitmentForest::build(ds), ds.selector("t"), cfg(500));
  CHECK(r.observed == 0.0);
  CHECK(r.replicate_mean == 0.0);
  CHECK(r.quantile_rank == 0.0);
  CHECK_FALSE(r.flagged);
}

TEST_CASE("trait aligned with trees is flagged") {
  const auto ds = two_trees(20, true);
  const auto f = RecruitmentForest::build(ds);
  const auto r = wsd_permutation_test(ds, f, ds.selector("t"), cfg(2000));
  CHECK(r.observed == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(r.quantile_rank > 0.99);
  CHECK(r.flagged);
  CHECK(r.replicates == 2000);

  const auto never = wsd_permutation_test(ds, f, ds.selector("t"), cfg(2000, 1.0));
  CHECK_FALSE(never.flagged);
  CHECK(never.quantile_rank <= 1.0);
}

TEST_CASE("permutation test is deterministic per seed") {
  const auto ds = two_trees(15, false);
  const auto f = RecruitmentForest::build(ds);
  const auto a = wsd_permutation_test(ds, f, ds.selector("t"), cfg(1000, 0.9, 77));
  const auto b = wsd_permutation_test(ds, f, ds.selector("t"), cfg(1000, 0.9, 77));
  CHECK(a.observed == b.observed);
  CHECK(a.quantile_rank == b.quantile_rank);
  CHECK(a.replicate_mean == b.replicate_mean);
  CHECK(a.replicate_q90 == b.replicate_q90);
  CHECK(a.rng_seed == 77);
  const auto c = wsd_permutation_test(ds, f, ds.selector("t"), cfg(1000, 0.9, 78));
  CHECK(c.observed == a.observed);
}

TEST_CASE("a single tree is not testable") {
  const auto ds = fx::dataset({{"A", ""}, {"B", ""}, {"a", "A", 1, true}, {"b", "A", 1, false}});
  try {
    wsd_permutation_test(ds, RecruitmentForest::build(ds), ds.selector("t"), cfg(100));
    FAIL("expected TooFewTrees");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewTrees);
  }
  const auto rows = bottleneck_batch(ds, RecruitmentForest::build(ds), {ds.selector("t")}, cfg(100));
  CHECK_FALSE(rows[0].result);
  CHECK(rows[0].reason.find("TooFewTrees") != std::string::npos);
}

TEST_CASE("all-points rows") {
  const auto one = fx::dataset({{"S", ""}, {"a", "S"}, {"b", "a"}, {"c", "S"}});
  const auto rows = all_points_data(one, RecruitmentForest::build(one), one.selector("t"));
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(rows[i].index == i + 1);

  const auto missing = fx::dataset({{"S", ""}, {"a", "S"}, {"b", "a", 1, std::nullopt}, {"c", "S"}});
  CHECK(all_points_data(missing, RecruitmentForest::build(missing), missing.selector("t")).size() == 2);

  const auto mixed = fx::dataset({{"A", ""}, {"B", ""}, {"a1", "A"}, {"b1", "B"}, {"a2", "A"}, {"b2", "B"}});
  const auto pts = all_points_data(mixed, RecruitmentForest::build(mixed), mixed.selector("t"));
  REQUIRE(pts.size() == 4);
  std::vector<int> tree0;
  for (const auto& p : pts) {
    if (p.tree == 0) tree0.push_back(p.interview_order);
  }
  CHECK(tree0 == std::vector<int>{3, 5});
  CHECK(pts[1].tree == 1);
}

TEST_CASE("bottleneck plot data tracks each tree") {
  const auto ds = two_trees(4, true);
  const auto d = bottleneck_plot_data(ds, RecruitmentForest::build(ds), ds.selector("t"));
  REQUIRE(d.trees.size() == 2);
  CHECK(d.length == 8);
  CHECK(d.overall == 0.5);
  CHECK(d.trees[0].values == std::vector<double>(4, 1.0));
  CHECK(d.trees[1].values == std::vector<double>(4, 0.0));
  CHECK(d.trees[0].index == std::vector<std::size_t>{1, 3, 5, 7});
}

TEST_CASE("bottleneck csv lists every row") {
  const auto ds = two_trees(5, false);
  const auto rows = bottleneck_batch(ds, RecruitmentForest::build(ds), {ds.selector("t")}, cfg(200));
  REQUIRE(rows[0].result);
  const auto csv = bottleneck_csv(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}
