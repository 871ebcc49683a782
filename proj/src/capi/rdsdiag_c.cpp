#include "rdsdiag.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "json.hpp"
#include "rdsdiag/bottleneck.hpp"
#include "rdsdiag/convergence.hpp"
#include "rdsdiag/csv.hpp"
#include "rdsdiag/dataset.hpp"
#include "rdsdiag/error.hpp"
#include "rdsdiag/estimators.hpp"
#include "rdsdiag/fisher.hpp"
#include "rdsdiag/format.hpp"
#include "rdsdiag/kvconfig.hpp"
#include "rdsdiag/report.hpp"
#include "rdsdiag/sim.hpp"
#include "rdsdiag/stats.hpp"

struct rds_dataset {
  rdsdiag::StudyDataset dataset;
  std::vector<std::string> warnings;
};

struct rds_pipeline {
  rdsdiag::KvConfig flags;
  rdsdiag::KvConfig file;
  std::string bundle_json;
  std::string out_dir;
};

namespace {

using namespace rdsdiag;
using nlohmann::json;

thread_local std::string g_message;
thread_local int g_detail = 0;

int status_of(ErrorFamily f) {
  switch (f) {
    case ErrorFamily::Config: return RDS_ERR_CONFIG;
    case ErrorFamily::Ingestion: return RDS_ERR_INGESTION;
    case ErrorFamily::Analysis: return RDS_ERR_ANALYSIS;
    case ErrorFamily::Simulation: return RDS_ERR_SIMULATION;
    case ErrorFamily::Render: return RDS_ERR_RENDER;
    case ErrorFamily::Io: return RDS_ERR_IO;
    case ErrorFamily::Internal: return RDS_ERR_INTERNAL;
  }
  return RDS_ERR_INTERNAL;
}

template <class F>
int guard(F&& body) {
  try {
    body();
    g_message.clear();
    g_detail = 0;
    return RDS_OK;
  } catch (const Error& e) {
    g_message = std::string(to_string(e.code())) + ": " + e.what();
    g_detail = static_cast<int>(e.code());
    return status_of(e.family());
  } catch (const std::bad_alloc&) {
    g_message = "out of memory";
  } catch (const std::exception& e) {
    g_message = e.what();
  } catch (...) {
    g_message = "unknown failure";
  }
  g_detail = static_cast<int>(ErrorCode::Internal);
  return RDS_ERR_INTERNAL;
}

void require(const void* p, const char* what) {
  if (!p) fail(ErrorCode::InvalidConfig, std::string(what) + " must not be null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<double> to_vec(const double* p, size_t n) { return n ? std::vector<double>(p, p + n) : std::vector<double>{}; }

json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  return round6(v);
}

}  // namespace

extern "C" {

const char* rds_version(void) { return "1.0.0"; }

const char* rds_last_error_message(void) { return g_message.c_str(); }

int rds_last_error_detail(void) { return g_detail; }

const char* rds_status_name(int status) {
  switch (status) {
    case RDS_OK: return "ok";
    case RDS_ERR_CONFIG: return "config";
    case RDS_ERR_INGESTION: return "ingestion";
    case RDS_ERR_ANALYSIS: return "analysis";
    case RDS_ERR_SIMULATION: return "simulation";
    case RDS_ERR_RENDER: return "render";
    case RDS_ERR_IO: return "io";
    default: return "internal";
  }
}

void rds_string_free(char* s) { std::free(s); }

int rds_dataset_load(const char* respondents, const char* followup, const char* traits, int strict,
                     const char* site, int target, int coupon_allotment, rds_dataset** out) {
  return guard([&] {
    require(respondents, "respondents");
    require(traits, "traits");
    require(out, "out");
    *out = nullptr;
    IngestOptions opts;
    opts.strict = strict != 0;
    if (site) opts.site_label = site;
    if (target >= 0) opts.target_sample_size = target;
    if (coupon_allotment > 0) opts.coupon_allotment = coupon_allotment;
    std::optional<std::filesystem::path> fu;
    if (followup && *followup) fu = followup;
    auto loaded = load_dataset(respondents, fu, traits, opts);
    *out = new rds_dataset{std::move(loaded.dataset), std::move(loaded.warnings)};
  });
}

size_t rds_dataset_size(const rds_dataset* ds) { return ds ? ds->dataset.size() : 0; }

size_t rds_dataset_seed_count(const rds_dataset* ds) { return ds ? ds->dataset.seed_count() : 0; }

size_t rds_dataset_warning_count(const rds_dataset* ds) { return ds ? ds->warnings.size() : 0; }

const char* rds_dataset_warning(const rds_dataset* ds, size_t i) {
  if (!ds || i >= ds->warnings.size()) return nullptr;
  return ds->warnings[i].c_str();
}

int rds_dataset_validate(const rds_dataset* ds, char** json_out) {
  return guard([&] {
    require(ds, "dataset");
    require(json_out, "json_out");
    const auto v = validate_dataset(ds->dataset).report;
    json missing = json::object();
    for (const auto& m : v.missing_traits) missing[m.trait] = m.missing;
    json inconsistent = json::array();
    for (auto i : v.inconsistent_respondents) inconsistent.push_back(ds->dataset[i].id);
    const json j{{"respondents", ds->dataset.size()},
                 {"seeds", ds->dataset.seed_count()},
                 {"clean", v.clean()},
                 {"funnel_violations", v.funnel_violations},
                 {"retest_funnel_violations", v.retest_funnel_violations},
                 {"truncations", v.truncations},
                 {"known_participants_cleared", v.known_participants_cleared},
                 {"inconsistent_reach_week", v.inconsistent_reach_week},
                 {"inconsistent_reach_day", v.inconsistent_reach_day},
                 {"inconsistent_respondents", inconsistent},
                 {"missing_traits", missing},
                 {"notes", v.notes},
                 {"ingest_warnings", ds->warnings}};
    *json_out = dup_string(j.dump(2) + "\n");
  });
}

int rds_dataset_write_repaired(const rds_dataset* ds, const char* dir) {
  return guard([&] {
    require(ds, "dataset");
    require(dir, "dir");
    std::filesystem::create_directories(dir);
    write_dataset(validate_dataset(ds->dataset).repaired, dir);
  });
}

void rds_dataset_free(rds_dataset* ds) { delete ds; }

int rds_pipeline_new(rds_pipeline** out) {
  return guard([&] {
    require(out, "out");
    *out = new rds_pipeline{};
  });
}

int rds_pipeline_set(rds_pipeline* p, const char* key, const char* value) {
  return guard([&] {
    require(p, "pipeline");
    require(key, "key");
    require(value, "value");
    KvConfig one;
    one.set(key, value);
    pipeline_config_from_kv(one);  // rejects unknown keys and bad values now
    p->flags.set(key, value);
  });
}

int rds_pipeline_load_config(rds_pipeline* p, const char* path) {
  return guard([&] {
    require(p, "pipeline");
    require(path, "path");
    p->file.merge(KvConfig::load(path));
  });
}

namespace {

PipelineConfig effective(const rds_pipeline* p) {
  KvConfig kv = p->flags;
  kv.merge(p->file);
  return pipeline_config_from_kv(kv);
}

}  // namespace

int rds_pipeline_run(rds_pipeline* p) {
  return guard([&] {
    require(p, "pipeline");
    const auto cfg = effective(p);
    const auto bundle = run_pipeline(cfg);
    write_bundle(bundle, cfg.out_dir);
    p->bundle_json = bundle.json;
    p->out_dir = cfg.out_dir.string();
  });
}

int rds_pipeline_run_dataset(rds_pipeline* p, const rds_dataset* ds) {
  return guard([&] {
    require(p, "pipeline");
    require(ds, "dataset");
    const auto cfg = effective(p);
    const auto bundle = run_pipeline(ds->dataset, cfg, ds->warnings);
    write_bundle(bundle, cfg.out_dir);
    p->bundle_json = bundle.json;
    p->out_dir = cfg.out_dir.string();
  });
}

int rds_pipeline_load_dataset(const rds_pipeline* p, rds_dataset** out) {
  return guard([&] {
    require(p, "pipeline");
    require(out, "out");
    *out = nullptr;
    const auto cfg = effective(p);
    if (cfg.respondents.empty() || cfg.traits.empty()) {
      fail(ErrorCode::InvalidConfig, "respondents and traits files are required");
    }
    IngestOptions opts;
    opts.strict = cfg.strict;
    opts.site_label = cfg.site;
    opts.target_sample_size = cfg.target;
    opts.coupon_allotment = cfg.coupon_allotment;
    auto loaded = load_dataset(cfg.respondents, cfg.followup, cfg.traits, opts);
    *out = new rds_dataset{std::move(loaded.dataset), std::move(loaded.warnings)};
  });
}

const char* rds_pipeline_bundle_json(const rds_pipeline* p) { return p ? p->bundle_json.c_str() : nullptr; }

const char* rds_pipeline_out_dir(const rds_pipeline* p) { return p ? p->out_dir.c_str() : nullptr; }

void rds_pipeline_free(rds_pipeline* p) { delete p; }

int rds_simulate_to_dir(const char* config_text, const char* out_dir, char** summary_json) {
  return guard([&] {
    require(config_text, "config_text");
    require(out_dir, "out_dir");
    const Scenario sc = scenario_from_config(KvConfig::parse(config_text));
    const SyntheticNetwork net = generate_network(sc.network, sc.network_seed);
    const SimResult res = simulate_rds(net, sc.sim);
    const std::filesystem::path dir = std::filesystem::absolute(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorCode::WriteFailed, "cannot create " + dir.string());
    write_dataset(res.dataset, dir);
    std::string conf;
    conf += "respondents = " + (dir / "respondents.csv").string() + "\n";
    conf += "followup = " + (dir / "followup.csv").string() + "\n";
    conf += "traits = " + (dir / "traits.csv").string() + "\n";
    conf += "site = " + res.dataset.site_label() + "\n";
    conf += "target = " + std::to_string(sc.sim.target_n) + "\n";
    conf += "coupon_allotment = " + std::to_string(res.dataset.coupon_allotment()) + "\n";
    write_text_file(dir / "report.conf", conf);
    json prev = json::object();
    for (const auto& [name, p] : res.true_prevalence) prev[name] = num(p);
    const json summary{{"respondents", res.dataset.size()},
                       {"seeds", res.dataset.seed_count()},
                       {"extinct", res.extinct},
                       {"target", sc.sim.target_n},
                       {"true_prevalence", prev},
                       {"network",
                        {{"nodes", net.node_count},
                         {"edges", net.edge_count()},
                         {"components_joined", net.components_joined},
                         {"block_modularity", num(block_modularity(net))}}}};
    const std::string text = summary.dump(2) + "\n";
    write_text_file(dir / "scenario.json", text);
    if (summary_json) *summary_json = dup_string(text);
  });
}

int rds_vh_estimate(const int* has_trait, const double* degree, size_t n, double* out) {
  return guard([&] {
    require(out, "out");
    if (n) {
      require(has_trait, "has_trait");
      require(degree, "degree");
    }
    std::vector<Member> m(n);
    for (size_t i = 0; i < n; ++i) m[i] = {has_trait[i] != 0, degree[i]};
    *out = vh_estimate(m);
  });
}

int rds_convergence_flag(const double* values, size_t n, size_t tau, double epsilon, int* flagged,
                         double* max_deviation) {
  return guard([&] {
    if (n) require(values, "values");
    const auto v = convergence_flag(to_vec(values, n), ConvergenceConfig{tau, epsilon});
    if (flagged) *flagged = v.flagged ? 1 : 0;
    if (max_deviation) *max_deviation = v.max_deviation;
  });
}

int rds_wsd(const double* tree_estimates, const size_t* tree_sizes, size_t trees, double overall, double* out) {
  return guard([&] {
    require(out, "out");
    if (trees) {
      require(tree_estimates, "tree_estimates");
      require(tree_sizes, "tree_sizes");
    }
    std::vector<TreeEstimate> t(trees);
    for (size_t i = 0; i < trees; ++i) t[i] = {i, tree_estimates[i], tree_sizes[i]};
    *out = wsd(t, overall);
  });
}

int rds_fisher_ci(int a, int b, int c, int d, double confidence, double* estimate, double* lower, double* upper) {
  return guard([&] {
    const auto r = fisher_odds_ratio(a, b, c, d, confidence);
    if (estimate) *estimate = r.estimate;
    if (lower) *lower = r.lower;
    if (upper) *upper = r.upper;
  });
}

namespace {

int rank_stat(const double* x, const double* y, size_t n, double* out,
              std::optional<double> (*f)(const std::vector<double>&, const std::vector<double>&)) {
  return guard([&] {
    require(out, "out");
    if (n) {
      require(x, "x");
      require(y, "y");
    }
    const auto r = f(to_vec(x, n), to_vec(y, n));
    if (!r) fail(ErrorCode::InsufficientData, "statistic undefined for constant input");
    *out = *r;
  });
}

}  // namespace

int rds_spearman(const double* x, const double* y, size_t n, double* out) {
  return rank_stat(x, y, n, out, &spearman_rho);
}

int rds_kendall(const double* x, const double* y, size_t n, double* out) {
  return rank_stat(x, y, n, out, &kendall_tau_b);
}

int rds_theil_sen(const double* x, const double* y, size_t n, double* out) {
  return guard([&] {
    require(out, "out");
    if (n) {
      require(x, "x");
      require(y, "y");
    }
    *out = theil_sen_slope(to_vec(x, n), to_vec(y, n));
  });
}

}  // extern "C"
