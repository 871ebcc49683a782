#include "rdsdiag/report.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <functional>
#include <type_traits>
#include "json.hpp"

#include "rdsdiag/behavior.hpp"
#include "rdsdiag/csv.hpp"
#include "rdsdiag/degree.hpp"
#include "rdsdiag/error.hpp"
#include "rdsdiag/estimators.hpp"
#include "rdsdiag/finitepop.hpp"
#include "rdsdiag/format.hpp"
#include "rdsdiag/forest.hpp"
#include "rdsdiag/plots.hpp"
#include "rdsdiag/rng.hpp"

namespace rdsdiag {

using nlohmann::json;

namespace {

json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  return round6(v);
}

template <class T>
json opt_num(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_integral_v<T>) {
    return *v;
  } else {
    return num(*v);
  }
}

std::string file_stem(std::string_view label) {
  std::string out;
  for (char c : label) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-';
    out.push_back(ok ? c : '_');
  }
  return out;
}

json not_evaluable(const std::string& reason) { return json{{"not_evaluable", reason}}; }

// Runs one analysis; analysis-family errors are recorded instead of thrown.
void attempt(json& target, const std::string& key, const std::function<json()>& body) {
  try {
    target[key] = body();
  } catch (const Error& e) {
    if (e.family() != ErrorFamily::Analysis) throw;
    target[key] = not_evaluable(e.what());
  }
}

json permutation_json(const PermutationResult& r) {
  return {{"observed", num(r.observed)},          {"replicates", r.replicates},
          {"quantile_rank", num(r.quantile_rank)}, {"flagged", r.flagged},
          {"threshold", num(r.threshold)},         {"rng_seed", std::to_string(r.rng_seed)},
          {"replicate_mean", num(r.replicate_mean)}, {"replicate_q90", num(r.replicate_q90)}};
}

json reason_table_json(const ReasonTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) rows.push_back({{"category", r.category}, {"count", r.count}, {"percent", num(r.percent)}});
  return {{"site", t.site}, {"total", t.total}, {"rows", rows}};
}

json day_distribution_json(const DayDistribution& d) {
  json counts = json::object();
  for (const auto& [day, n] : d.counts) counts[std::to_string(day)] = n;
  return {{"counts", counts},
          {"total", d.total},
          {"within_1_day", num(d.within_1_day)},
          {"within_7_days", num(d.within_7_days)},
          {"median", num(d.median)}};
}

json reach_json(const ReachSummary& r) {
  return {{"mean_proportion", num(r.mean_proportion)},
          {"used", r.used},
          {"excluded_inconsistent", r.excluded_inconsistent},
          {"excluded_missing", r.excluded_missing}};
}

class Builder {
 public:
  Builder(const StudyDataset& ds, const PipelineConfig& cfg, const std::vector<std::string>& warnings)
      : ds_(ds), cfg_(cfg), warnings_(warnings), forest_(RecruitmentForest::build(ds)), selectors_(ds.all_selectors()) {}

  ReportBundle build() {
    json sections = json::object();
    for (Section s : all_sections()) {
      if (!cfg_.sections.count(s)) continue;
      switch (s) {
        case Section::Dataset: sections["dataset"] = dataset_section(); break;
        case Section::Estimate: sections["estimate"] = estimate_section(); break;
        case Section::Convergence: sections["convergence"] = convergence_section(); break;
        case Section::Bottleneck: sections["bottleneck"] = bottleneck_section(); break;
        case Section::Behavior: sections["behavior"] = behavior_section(); break;
        case Section::Degree: sections["degree"] = degree_section(); break;
        case Section::FinitePop: sections["finitepop"] = finitepop_section(); break;
      }
    }
    json manifest = json::array();
    for (const auto& [path, content] : bundle_.files) {
      manifest.push_back({{"path", path}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
    }
    json root{{"schema_version", kBundleSchemaVersion},
              {"site", ds_.site_label()},
              {"seed", std::to_string(cfg_.seed)},
              {"sections", sections},
              {"flags", flags_},
              {"manifest", manifest}};
    bundle_.json = root.dump(2) + "\n";
    return std::move(bundle_);
  }

 private:
  void add_file(const std::string& path, std::string content) { bundle_.files[path] = std::move(content); }

  // Plots are skipped, with a note, when there is nothing to draw.
  void add_plot(json& notes, const std::string& path, std::string_view kind, const PlotInput& data,
                const PlotStyle& style = {}) {
    if (!cfg_.plots) return;
    try {
      add_file(path, render_plot(kind, data, style));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyData) throw;
      notes.push_back(path + ": " + e.what());
    }
  }

  void add_flag(const std::string& section, const std::string& label, const std::string& indicator) {
    flags_.push_back({{"section", section}, {"label", label}, {"indicator", indicator}});
  }

  json dataset_section() {
    json out;
    json plot_notes = json::array();
    std::size_t followups = 0, coupons_out = 0;
    for (const auto& r : ds_.respondents()) {
      if (r.followup) ++followups;
      coupons_out += r.coupons_out.size();
    }
    const std::size_t n = ds_.size();
    out["sample_sizes"] = {{"respondents", n},
                           {"seeds", ds_.seed_count()},
                           {"recruits", n - ds_.seed_count()},
                           {"followup_completed", followups},
                           {"followup_percent", num(n ? 100.0 * followups / n : NAN)},
                           {"coupons_issued", coupons_out},
                           {"target", opt_num(ds_.target_sample_size())},
                           {"coupon_allotment", ds_.coupon_allotment()}};
    json waves = json::array();
    for (int w = 0; w <= forest_.max_wave(); ++w) {
      std::size_t c = 0;
      for (std::size_t i = 0; i < forest_.size(); ++i) c += forest_.wave(i) == w;
      waves.push_back(c);
    }
    json trees = json::array();
    for (std::size_t root : forest_.roots()) {
      trees.push_back({{"seed", forest_.id(root)}, {"recruits", forest_.tree_size(root)}});
    }
    out["forest"] = {{"trees", trees}, {"wave_counts", waves}, {"max_wave", forest_.max_wave()}};
    json traits = json::array();
    for (std::size_t t = 0; t < ds_.trait_specs().size(); ++t) {
      const auto& spec = ds_.trait_specs()[t];
      std::size_t missing = 0;
      for (const auto& r : ds_.respondents()) missing += !r.traits[t].has_value();
      traits.push_back({{"name", spec.name},
                        {"kind", spec.kind == TraitKind::Binary ? "binary" : "categorical"},
                        {"reference_level", spec.reference_level},
                        {"levels", ds_.observed_levels(t)},
                        {"missing", missing}});
    }
    out["traits"] = traits;
    const auto v = validate_dataset(ds_).report;
    out["validation"] = {{"funnel_violations", v.funnel_violations},
                         {"retest_funnel_violations", v.retest_funnel_violations},
                         {"truncations", v.truncations},
                         {"known_participants_cleared", v.known_participants_cleared},
                         {"inconsistent_reach_week", v.inconsistent_reach_week},
                         {"inconsistent_reach_day", v.inconsistent_reach_day},
                         {"notes", v.notes}};
    out["ingest_warnings"] = warnings_;
    add_file("dataset/forest_edges.csv", forest_.edge_list_csv());
    add_plot(plot_notes, "dataset/chains.svg", "chains",
             chains_data(ds_, forest_, selectors_.empty() ? std::optional<TraitSelector>{} : selectors_.front()));
    out["plot_notes"] = plot_notes;
    return out;
  }

  json estimate_section() {
    json out;
    json rows = json::array();
    for (const auto& sel : selectors_) {
      json row{{"label", sel.label}};
      try {
        const auto inc = included_observations(ds_, sel, cfg_.degree_question);
        row["n"] = inc.observations.size();
        row["excluded"] = {{"seeds", inc.seeds},
                           {"missing_trait", inc.missing_trait},
                           {"missing_degree", inc.missing_degree},
                           {"zero_degree", inc.zero_degree}};
        row["estimate"] = num(vh_estimate(to_members(inc.observations)));
        json per_tree = json::array();
        for (const auto& t : per_tree_estimates(ds_, forest_, sel, cfg_.degree_question)) {
          per_tree.push_back({{"seed", forest_.id(t.root)}, {"estimate", num(t.estimate)}, {"n", t.n}});
        }
        row["per_tree"] = per_tree;
      } catch (const Error& e) {
        if (e.family() != ErrorFamily::Analysis) throw;
        row["not_evaluable"] = e.what();
      }
      rows.push_back(row);
    }
    out["degree_question"] = std::string(to_string(cfg_.degree_question));
    out["vh"] = rows;
    if (!cfg_.population_sizes.empty()) {
      const auto table = ss_table();
      json ss = json::array();
      for (const auto& r : table.rows) {
        json cells = json::array();
        for (const auto& c : r.scenarios) {
          cells.push_back({{"population_size", num(c.population_size)},
                           {"ss", num(c.ss)},
                           {"difference", num(c.difference)},
                           {"converged", c.converged}});
        }
        ss.push_back({{"label", r.trait},
                      {"vh", num(r.vh)},
                      {"scenarios", cells},
                      {"max_abs_difference", num(r.max_abs_difference)},
                      {"flagged", r.flagged}});
      }
      out["ss_vh"] = {{"rows", ss}, {"threshold", num(table.threshold)}, {"not_evaluable", table.not_evaluable}};
      add_file("estimate/ss_vh.csv", ss_vh_csv(table));
    }
    return out;
  }

  const SSVHTable& ss_table() {
    if (!ss_table_) {
      std::vector<SSConfig> scenarios;
      for (double n : cfg_.population_sizes) {
        SSConfig c;
        c.population_size = n;
        c.replications = cfg_.ss_replications;
        c.rng_seed = derive_seed(cfg_.seed, 11);
        scenarios.push_back(c);
      }
      ss_table_ = ss_vh_table(ds_, selectors_, scenarios, cfg_.ss_threshold, cfg_.degree_question);
    }
    return *ss_table_;
  }

  json convergence_section() {
    json out;
    json plot_notes = json::array();
    const auto rows = convergence_batch(ds_, forest_, selectors_, cfg_.convergence, cfg_.degree_question);
    json list = json::array();
    FlagGrid grid;
    grid.column_labels = {"convergence"};
    for (const auto& r : rows) {
      json row{{"label", r.label}, {"length", r.series.values.size()}};
      if (r.verdict) {
        row["status"] = r.verdict->flagged ? "flagged" : "ok";
        row["flagged"] = r.verdict->flagged;
        row["final_estimate"] = num(r.series.final_value());
        row["max_deviation"] = num(r.verdict->max_deviation);
        row["first_violation_offset"] = opt_num(r.verdict->first_violation_offset);
        row["window"] = r.verdict->window;
        if (r.verdict->flagged) add_flag("convergence", r.label, "convergence");
        add_plot(plot_notes, "convergence/" + file_stem(r.label) + ".svg", "convergence", r.series);
      } else {
        row["status"] = "not_evaluable";
        row["not_evaluable"] = r.reason;
      }
      grid.row_labels.push_back(r.label);
      grid.cells.push_back({r.verdict ? std::optional<bool>(r.verdict->flagged) : std::nullopt});
      list.push_back(row);
    }
    out["config"] = {{"tau", cfg_.convergence.tau}, {"epsilon", num(cfg_.convergence.epsilon)}};
    out["rows"] = list;
    add_file("convergence/convergence.csv", convergence_csv(rows));
    add_plot(plot_notes, "convergence/flag_grid.svg", "flag-grid", grid);
    out["plot_notes"] = plot_notes;
    return out;
  }

  json bottleneck_section() {
    json out;
    json plot_notes = json::array();
    BottleneckConfig bc{cfg_.replicates, cfg_.threshold, cfg_.seed};
    const auto rows = bottleneck_batch(ds_, forest_, selectors_, bc, cfg_.degree_question);
    json list = json::array();
    FlagGrid grid;
    grid.column_labels = {"bottleneck"};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      json row{{"label", r.label}};
      if (r.result) {
        row.update(permutation_json(*r.result));
        if (r.result->flagged) add_flag("bottleneck", r.label, "bottleneck");
      } else {
        row["not_evaluable"] = r.reason;
      }
      grid.row_labels.push_back(r.label);
      grid.cells.push_back({r.result ? std::optional<bool>(r.result->flagged) : std::nullopt});
      list.push_back(row);
      const auto& sel = selectors_[i];
      const std::string stem = file_stem(sel.label);
      try {
        add_plot(plot_notes, "bottleneck/" + stem + ".svg", "bottleneck",
                 bottleneck_plot_data(ds_, forest_, sel, cfg_.degree_question));
        add_plot(plot_notes, "all_points/" + stem + ".svg", "all-points",
                 AllPointsData{sel.label, all_points_data(ds_, forest_, sel, cfg_.degree_question),
                               forest_.roots().size()});
      } catch (const Error& e) {
        if (e.family() != ErrorFamily::Analysis) throw;
        plot_notes.push_back(stem + ": " + e.what());
      }
    }
    out["config"] = {{"replicates", cfg_.replicates}, {"threshold", num(cfg_.threshold)},
                     {"rng_seed", std::to_string(cfg_.seed)}};
    out["rows"] = list;
    add_file("bottleneck/bottleneck.csv", bottleneck_csv(rows));
    add_plot(plot_notes, "bottleneck/flag_grid.svg", "flag-grid", grid);
    out["plot_notes"] = plot_notes;
    return out;
  }

  json behavior_section() {
    json out;
    json plot_notes = json::array();
    const std::string site = ds_.site_label();
    attempt(out, "reciprocation", [&] {
      const auto r = reciprocation_rate(ds_);
      add_file("behavior/reciprocation.csv", reciprocation_csv({{site, r}}));
      return json{{"percent", num(r.percent)}, {"yes", r.yes}, {"answered", r.answered}, {"unanswered", r.unanswered}};
    });
    attempt(out, "network_reciprocity", [&] {
      const auto r = network_reciprocity_stats(ds_);
      return json{{"n", r.normalized_difference.size()}, {"excluded_zero", r.excluded_zero},
                  {"missing", r.missing},                {"equal", r.equal},
                  {"give_more", r.give_more},            {"receive_more", r.receive_more},
                  {"median", num(r.median)},             {"mean", num(r.mean)},
                  {"q3", num(r.q3)}};
    });
    {
      json rows = json::array();
      EffectivenessData eff;
      for (const auto& sel : selectors_) {
        const auto e = recruitment_effectiveness(ds_, forest_, sel);
        rows.push_back({{"label", e.label},
                        {"n_positive", e.n_positive},
                        {"n_negative", e.n_negative},
                        {"mean_positive", num(e.mean_positive)},
                        {"mean_negative", num(e.mean_negative)},
                        {"ratio", opt_num(e.ratio)}});
        eff.rows.push_back(e);
      }
      out["effectiveness"] = rows;
      add_plot(plot_notes, "behavior/effectiveness.svg", "effectiveness", eff);
    }
    attempt(out, "recruitment_bias", [&] {
      const auto lv = recruitment_bias_levels(ds_, forest_);
      const auto tests = recruitment_bias_tests(ds_, forest_, cfg_.bias_replicates, derive_seed(cfg_.seed, 7),
                                                cfg_.threshold);
      json tl = json::array();
      for (const auto& t : tests.tests) {
        json row{{"level", t.level},
                 {"expected", num(t.expected)},
                 {"evaluated", t.evaluated},
                 {"inconsistent", t.inconsistent},
                 {"inconsistent_proportion", num(t.inconsistent_proportion)}};
        if (t.result) {
          row.update(permutation_json(*t.result));
        } else {
          row["not_evaluable"] = "no consistent recruiter";
        }
        tl.push_back(row);
      }
      add_plot(plot_notes, "behavior/bias.svg", "bias", BiasPlotData{{{site, lv}}});
      return json{{"levels",
                   {{"contacts", num(lv.contacts_level)},
                    {"recipients", num(lv.recipients_level)},
                    {"recruits", num(lv.recruits_level)},
                    {"n_recruiters", lv.n_recruiters},
                    {"excluded_inconsistent", lv.excluded_inconsistent}}},
                  {"tests", tl},
                  {"n_recruiters", tests.n_recruiters}};
    });
    attempt(out, "nonresponse", [&] {
      const auto r = nonresponse_rates(ds_, forest_);
      add_file("behavior/nonresponse.csv", nonresponse_csv({{site, r}}));
      return json{{"coupon_refusal", num(r.coupon_refusal)},
                  {"non_return", num(r.non_return)},
                  {"total_non_response", num(r.total_non_response)},
                  {"n_recruiters", r.n_recruiters},
                  {"refusals", r.refusals},
                  {"distributed", r.distributed},
                  {"returned", r.returned},
                  {"impossible", r.impossible}};
    });
    const auto refusals = refusal_reason_table(ds_);
    const auto motivations = motivation_table(ds_);
    out["refusal_reasons"] = reason_table_json(refusals);
    out["motivations"] = reason_table_json(motivations);
    add_file("behavior/refusal_reasons.csv", reason_tables_csv({refusals}));
    add_file("behavior/motivations.csv", reason_tables_csv({motivations}));
    {
      json rows = json::array();
      MotivationOutcomeData mo;
      for (const auto& sel : selectors_) {
        try {
          const auto m = motivation_outcome(ds_, cfg_.motivation, sel);
          rows.push_back({{"outcome", m.outcome},
                          {"a", m.a}, {"b", m.b}, {"c", m.c}, {"d", m.d},
                          {"odds_ratio", num(m.odds_ratio.estimate)},
                          {"conditional_mle", num(m.odds_ratio.conditional_mle)},
                          {"lower", num(m.odds_ratio.lower)},
                          {"upper", num(m.odds_ratio.upper)},
                          {"confidence", num(m.odds_ratio.confidence)}});
          mo.rows.push_back(m);
        } catch (const Error& e) {
          if (e.family() != ErrorFamily::Analysis) throw;
          rows.push_back({{"outcome", sel.label}, {"not_evaluable", e.what()}});
        }
      }
      out["motivation_outcome"] = {{"motivation", cfg_.motivation}, {"rows", rows}};
      add_plot(plot_notes, "behavior/motivation_outcome.svg", "motivation-outcome", mo);
    }
    out["plot_notes"] = plot_notes;
    return out;
  }

  json degree_section() {
    json out;
    json plot_notes = json::array();
    {
      const auto t = time_window_stats(ds_, forest_);
      out["time_windows"] = {{"reach_day", reach_json(t.reach_day)},
                             {"reach_week", reach_json(t.reach_week)},
                             {"coupon_days", day_distribution_json(t.coupon_days)},
                             {"interview_gap", day_distribution_json(t.interview_gap)},
                             {"gap_missing_dates", t.gap_missing_dates}};
    }
    attempt(out, "test_retest", [&] {
      const auto t = test_retest_stats(ds_, cfg_.degree_question);
      return json{{"question", std::string(to_string(t.question))},
                  {"n", t.n},
                  {"median_difference", num(t.median_difference)},
                  {"q1_difference", num(t.q1_difference)},
                  {"q3_difference", num(t.q3_difference)},
                  {"spearman", opt_num(t.spearman)}};
    });
    {
      const auto table = estimate_sensitivity_table(ds_, forest_, selectors_, cfg_.degree_question);
      json rows = json::array();
      for (const auto& r : table.rows) {
        rows.push_back({{"label", r.trait},
                        {"n", r.n},
                        {"initial", num(r.initial)},
                        {"retest", num(r.retest)},
                        {"abs_difference", num(r.abs_difference)},
                        {"relative_difference", opt_num(r.relative_difference)}});
      }
      out["sensitivity"] = {{"rows", rows}, {"not_evaluable", table.not_evaluable}};
      add_file("degree/sensitivity.csv", sensitivity_csv(table));
      add_plot(plot_notes, "degree/sensitivity_pairs.svg", "sensitivity-pairs", SensitivityPairsData{table.rows});
    }
    attempt(out, "trend", [&] {
      const auto t = degree_trend(ds_, all_trend_methods(), cfg_.degree_question);
      json verdicts = json::array();
      for (const auto& v : t.verdicts) {
        verdicts.push_back({{"method", std::string(to_string(v.method))},
                            {"sign", v.sign},
                            {"statistic", num(v.statistic)},
                            {"n", v.n},
                            {"excluded", v.excluded}});
      }
      add_file("degree/trend.csv", trend_csv(t));
      add_plot(plot_notes, "degree/trend.svg", "degree-trend", t);
      return json{{"verdicts", verdicts}};
    });
    out["plot_notes"] = plot_notes;
    return out;
  }

  json finitepop_section() {
    json out;
    json plot_notes = json::array();
    FinitePopConfig fc{cfg_.failed_attempts_threshold};
    const auto s = indicator_summary(ds_, forest_, fc);
    out["indicators"] = {{"attainment_failed", s.attainment_failed ? json(*s.attainment_failed) : json(nullptr)},
                         {"failed_attempts", s.failed_attempts_flag ? json(*s.failed_attempts_flag) : json(nullptr)},
                         {"participants_known_trend", s.participants_known_trend_flag
                                                          ? json(*s.participants_known_trend_flag)
                                                          : json(nullptr)},
                         {"notes", s.notes}};
    FlagGrid grid;
    grid.row_labels = {s.site};
    grid.column_labels = {"attainment", "failed attempts", "known trend"};
    grid.cells = {{s.attainment_failed, s.failed_attempts_flag, s.participants_known_trend_flag}};
    if (s.attainment_failed.value_or(false)) add_flag("finitepop", s.site, "attainment_failed");
    if (s.failed_attempts_flag.value_or(false)) add_flag("finitepop", s.site, "failed_attempts");
    if (s.participants_known_trend_flag.value_or(false)) add_flag("finitepop", s.site, "participants_known_trend");
    if (!cfg_.population_sizes.empty()) {
      const auto& table = ss_table();
      std::optional<bool> any;
      for (const auto& r : table.rows) any = any.value_or(false) || r.flagged;
      out["indicators"]["ss_vh_sensitivity"] = any ? json(*any) : json(nullptr);
      grid.column_labels.push_back("SS vs VH");
      grid.cells[0].push_back(any);
      if (any.value_or(false)) add_flag("finitepop", s.site, "ss_vh_sensitivity");
    }
    attempt(out, "failed_attempts", [&] {
      const auto f = failed_attempts_indicator(ds_, cfg_.failed_attempts_threshold);
      return json{{"answered", f.answered},
                  {"with_failures", f.with_failures},
                  {"percent", num(f.percent)},
                  {"flagged", f.flagged},
                  {"threshold", num(cfg_.failed_attempts_threshold)},
                  {"bands", {{"0", f.bands[0]}, {"1-3", f.bands[1]}, {"4+", f.bands[2]}}}};
    });
    attempt(out, "participants_known", [&] {
      const auto t = participants_known_trend(ds_, forest_);
      add_plot(plot_notes, "finitepop/participants_known.svg", "participants-known", t);
      return json{{"slope", num(t.slope)},
                  {"intercept", num(t.intercept)},
                  {"flagged", t.flagged},
                  {"points", t.points.size()},
                  {"excluded_zero_contacts", t.excluded_zero_contacts},
                  {"excluded_missing", t.excluded_missing},
                  {"truncations", t.truncations}};
    });
    add_file("finitepop/indicators.csv", indicator_grid_csv({s}));
    add_plot(plot_notes, "finitepop/flag_grid.svg", "flag-grid", grid);
    out["plot_notes"] = plot_notes;
    return out;
  }

  const StudyDataset& ds_;
  const PipelineConfig& cfg_;
  const std::vector<std::string>& warnings_;
  RecruitmentForest forest_;
  std::vector<TraitSelector> selectors_;
  std::optional<SSVHTable> ss_table_;
  json flags_ = json::array();
  ReportBundle bundle_;
};

}  // namespace

std::string_view to_string(Section s) noexcept {
  switch (s) {
    case Section::Dataset: return "dataset";
    case Section::Estimate: return "estimate";
    case Section::Convergence: return "convergence";
    case Section::Bottleneck: return "bottleneck";
    case Section::Behavior: return "behavior";
    case Section::Degree: return "degree";
    case Section::FinitePop: return "finitepop";
  }
  return "?";
}

Section section_from_string(std::string_view text) {
  for (Section s : all_sections()) {
    if (to_string(s) == text) return s;
  }
  fail(ErrorCode::InvalidConfig, "unknown section: " + std::string(text));
}

const std::vector<Section>& all_sections() {
  static const std::vector<Section> all{Section::Dataset,  Section::Estimate, Section::Convergence,
                                        Section::Bottleneck, Section::Behavior, Section::Degree,
                                        Section::FinitePop};
  return all;
}

PipelineConfig pipeline_config_from_kv(const KvConfig& kv, PipelineConfig c) {
  kv.reject_unknown({"respondents", "followup", "traits", "out_dir", "seed", "tau", "epsilon", "replicates",
                     "threshold", "population_size", "ss_replications", "ss_threshold", "bias_replicates",
                     "failed_attempts_threshold", "motivation", "degree_question", "strict", "site", "target",
                     "coupon_allotment", "sections", "plots"});
  if (auto v = kv.text("respondents")) c.respondents = *v;
  if (auto v = kv.text("followup")) c.followup = v->empty() ? std::nullopt : std::optional<std::filesystem::path>(*v);
  if (auto v = kv.text("traits")) c.traits = *v;
  if (auto v = kv.text("out_dir")) c.out_dir = *v;
  c.seed = kv.seed_or("seed", c.seed);
  const long long tau = kv.integer_or("tau", static_cast<long long>(c.convergence.tau));
  if (tau < 1) fail(ErrorCode::InvalidConfig, "tau must be at least 1");
  c.convergence.tau = static_cast<std::size_t>(tau);
  c.convergence.epsilon = kv.number_or("epsilon", c.convergence.epsilon);
  if (!(c.convergence.epsilon > 0)) fail(ErrorCode::InvalidConfig, "epsilon must be positive");
  auto count = [&](const char* key, std::size_t fallback) {
    const long long v = kv.integer_or(key, static_cast<long long>(fallback));
    if (v < 1) fail(ErrorCode::InvalidConfig, std::string(key) + " must be at least 1");
    return static_cast<std::size_t>(v);
  };
  c.replicates = count("replicates", c.replicates);
  c.ss_replications = count("ss_replications", c.ss_replications);
  c.bias_replicates = count("bias_replicates", c.bias_replicates);
  c.threshold = kv.number_or("threshold", c.threshold);
  if (!(c.threshold >= 0 && c.threshold <= 1)) fail(ErrorCode::InvalidConfig, "threshold must be in [0,1]");
  if (kv.has("population_size")) c.population_sizes = kv.numbers("population_size");
  c.ss_threshold = kv.number_or("ss_threshold", c.ss_threshold);
  c.failed_attempts_threshold = kv.number_or("failed_attempts_threshold", c.failed_attempts_threshold);
  c.motivation = kv.text_or("motivation", c.motivation);
  if (auto v = kv.text("degree_question")) c.degree_question = degree_question_from_string(*v);
  c.strict = kv.flag_or("strict", c.strict);
  c.site = kv.text_or("site", c.site);
  if (kv.has("target")) c.target = static_cast<int>(kv.integer_or("target", 0));
  c.coupon_allotment = static_cast<int>(kv.integer_or("coupon_allotment", c.coupon_allotment));
  if (kv.has("sections")) {
    c.sections.clear();
    for (const auto& s : kv.list("sections")) {
      if (s == "none") continue;
      if (s == "all") {
        c.sections.insert(all_sections().begin(), all_sections().end());
        continue;
      }
      c.sections.insert(section_from_string(s));
    }
  }
  c.plots = kv.flag_or("plots", c.plots);
  return c;
}

ReportBundle run_pipeline(const StudyDataset& ds, const PipelineConfig& cfg,
                          const std::vector<std::string>& ingest_warnings) {
  return Builder(ds, cfg, ingest_warnings).build();
}

ReportBundle run_pipeline(const PipelineConfig& cfg) {
  if (cfg.respondents.empty()) fail(ErrorCode::InvalidConfig, "no respondents file configured");
  if (cfg.traits.empty()) fail(ErrorCode::InvalidConfig, "no traits file configured");
  IngestOptions opts;
  opts.strict = cfg.strict;
  opts.site_label = cfg.site;
  opts.target_sample_size = cfg.target;
  opts.coupon_allotment = cfg.coupon_allotment;
  auto loaded = load_dataset(cfg.respondents, cfg.followup, cfg.traits, opts);
  return run_pipeline(loaded.dataset, cfg, loaded.warnings);
}

void write_bundle(const ReportBundle& bundle, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::WriteFailed, "cannot create " + out_dir.string() + ": " + ec.message());
  for (const auto& [rel, content] : bundle.files) {
    const auto path = out_dir / rel;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorCode::WriteFailed, "cannot create " + path.parent_path().string());
    write_text_file(path, content);
  }
  write_text_file(out_dir / "bundle.json", bundle.json);
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::Internal, "sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace rdsdiag
