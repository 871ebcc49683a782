#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "rdsdiag.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path temp_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("rdsdiag-capi-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

const char* kScenario =
    "network.blocks = 150, 150\n"
    "network.within = 0.05\n"
    "network.between = 0.002\n"
    "trait.hiv = bernoulli:0.2,0.35\n"
    "sim.target_n = 120\n"
    "sim.seed = 3\n";

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(rds_version()).size() > 0);
  CHECK(std::string(rds_status_name(RDS_OK)) == "ok");
  CHECK(std::string(rds_status_name(RDS_ERR_INGESTION)).size() > 0);
  CHECK(std::string(rds_status_name(77)).size() > 0);
}

TEST_CASE("primitives") {
  const int trait[] = {1, 0, 1, 0};
  const double degree[] = {1, 1, 1, 1};
  double v = 0;
  REQUIRE(rds_vh_estimate(trait, degree, 4, &v) == RDS_OK);
  CHECK(v == 0.5);
  const double bad_degree[] = {1, 0, 1, 1};
  CHECK(rds_vh_estimate(trait, bad_degree, 4, &v) == RDS_ERR_ANALYSIS);
  CHECK(std::string(rds_last_error_message()).size() > 0);
  CHECK(rds_vh_estimate(nullptr, degree, 4, &v) == RDS_ERR_CONFIG);

  const double flat[] = {0.3, 0.3, 0.3, 0.3, 0.3};
  int flagged = -1;
  double dev = -1;
  REQUIRE(rds_convergence_flag(flat, 5, 3, 0.01, &flagged, &dev) == RDS_OK);
  CHECK(flagged == 0);
  CHECK(dev == 0.0);
  const double step[] = {0.1, 0.1, 0.5, 0.5, 0.5};
  REQUIRE(rds_convergence_flag(step, 5, 10, 0.01, &flagged, &dev) == RDS_OK);
  CHECK(flagged == 1);
  CHECK(rds_convergence_flag(step, 5, 3, 0.0, &flagged, &dev) == RDS_ERR_CONFIG);

  const double est[] = {0.2, 0.8};
  const size_t sizes[] = {10, 10};
  REQUIRE(rds_wsd(est, sizes, 2, 0.5, &v) == RDS_OK);
  CHECK(v == doctest::Approx(1.8).epsilon(1e-12));

  double e = 0, lo = 0, hi = 0;
  REQUIRE(rds_fisher_ci(8, 2, 5, 5, 0.95, &e, &lo, &hi) == RDS_OK);
  CHECK(e == 4.0);
  CHECK(lo < e);
  CHECK(hi > e);

  const double x[] = {1, 2, 3, 4};
  const double y[] = {4, 3, 2, 1};
  REQUIRE(rds_spearman(x, y, 4, &v) == RDS_OK);
  CHECK(v == -1.0);
  REQUIRE(rds_kendall(x, y, 4, &v) == RDS_OK);
  CHECK(v == -1.0);
  REQUIRE(rds_theil_sen(x, y, 4, &v) == RDS_OK);
  CHECK(v == -1.0);
  const double same[] = {2, 2, 2, 2};
  CHECK(rds_spearman(x, same, 4, &v) == RDS_ERR_ANALYSIS);
}

TEST_CASE("simulate, load and run") {
  const auto dir = temp_dir("run");
  char* summary = nullptr;
  REQUIRE(rds_simulate_to_dir(kScenario, dir.c_str(), &summary) == RDS_OK);
  REQUIRE(summary);
  const auto s = json::parse(summary);
  rds_string_free(summary);
  CHECK(s["respondents"] == 120);
  CHECK(fs::exists(dir / "report.conf"));

  rds_dataset* ds = nullptr;
  REQUIRE(rds_dataset_load((dir / "respondents.csv").c_str(), (dir / "followup.csv").c_str(),
                           (dir / "traits.csv").c_str(), 1, "sim", 120, 3, &ds) == RDS_OK);
  CHECK(rds_dataset_size(ds) == 120);
  CHECK(rds_dataset_seed_count(ds) == 6);
  CHECK(rds_dataset_warning_count(ds) == 0);
  char* report = nullptr;
  REQUIRE(rds_dataset_validate(ds, &report) == RDS_OK);
  CHECK(json::parse(report).is_object());
  rds_string_free(report);

  rds_pipeline* p = nullptr;
  REQUIRE(rds_pipeline_new(&p) == RDS_OK);
  REQUIRE(rds_pipeline_load_config(p, (dir / "report.conf").c_str()) == RDS_OK);
  REQUIRE(rds_pipeline_set(p, "out_dir", (dir / "bundle").c_str()) == RDS_OK);
  REQUIRE(rds_pipeline_set(p, "replicates", "200") == RDS_OK);
  REQUIRE(rds_pipeline_set(p, "bias_replicates", "200") == RDS_OK);
  CHECK(rds_pipeline_set(p, "colour", "red") == RDS_ERR_CONFIG);
  REQUIRE(rds_pipeline_run(p) == RDS_OK);
  const std::string first = rds_pipeline_bundle_json(p);
  CHECK(fs::exists(dir / "bundle" / "bundle.json"));
  REQUIRE(rds_pipeline_run_dataset(p, ds) == RDS_OK);
  CHECK(first == rds_pipeline_bundle_json(p));

  rds_dataset* again = nullptr;
  REQUIRE(rds_pipeline_load_dataset(p, &again) == RDS_OK);
  CHECK(rds_dataset_size(again) == 120);
  rds_dataset_free(again);
  rds_dataset_free(ds);
  rds_pipeline_free(p);
  fs::remove_all(dir);
}

TEST_CASE("missing input") {
  const auto dir = temp_dir("missing");
  rds_pipeline* p = nullptr;
  REQUIRE(rds_pipeline_new(&p) == RDS_OK);
  rds_pipeline_set(p, "respondents", (dir / "nope.csv").c_str());
  rds_pipeline_set(p, "traits", (dir / "nope_traits.csv").c_str());
  rds_pipeline_set(p, "out_dir", (dir / "out").c_str());
  CHECK(rds_pipeline_run(p) == RDS_ERR_INGESTION);
  CHECK(rds_last_error_detail() == 212);
  CHECK(std::string(rds_last_error_message()).find("nope") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out"));
  rds_pipeline_free(p);

  rds_dataset* ds = nullptr;
  CHECK(rds_dataset_load("/nonexistent/r.csv", nullptr, "/nonexistent/t.csv", 1, "x", -1, 3, &ds) ==
        RDS_ERR_INGESTION);
  CHECK(ds == nullptr);
  rds_dataset_free(nullptr);
  rds_pipeline_free(nullptr);
  rds_string_free(nullptr);
}
