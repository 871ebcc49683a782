#include "rdsdiag/degree.hpp"

#include <cmath>
#include <limits>

#include "rdsdiag/csv.hpp"
#include "rdsdiag/error.hpp"
#include "rdsdiag/estimators.hpp"
#include "rdsdiag/format.hpp"
#include "rdsdiag/stats.hpp"

namespace rdsdiag {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ReachSummary summarize_reach(const StudyDataset& ds, bool week) {
  ReachSummary s;
  double total = 0.0;
  for (const auto& r : ds.respondents()) {
    const auto& d = r.degree;
    const Count reach = week ? d.reach_week : d.reach_day;
    if (!reach || !d.age || *d.age <= 0) {
      ++s.excluded_missing;
      continue;
    }
    if (*reach > *d.age) {
      ++s.excluded_inconsistent;
      continue;
    }
    total += static_cast<double>(*reach) / *d.age;
    ++s.used;
  }
  s.mean_proportion = s.used ? total / static_cast<double>(s.used) : kNaN;
  return s;
}

DayDistribution summarize_days(const std::vector<int>& days) {
  DayDistribution out;
  out.total = days.size();
  std::size_t one = 0, seven = 0;
  std::vector<double> v;
  for (int d : days) {
    ++out.counts[d];
    one += d <= 1;
    seven += d <= 7;
    v.push_back(d);
  }
  if (days.empty()) {
    out.within_1_day = out.within_7_days = out.median = kNaN;
  } else {
    out.within_1_day = static_cast<double>(one) / days.size();
    out.within_7_days = static_cast<double>(seven) / days.size();
    out.median = median(v);
  }
  return out;
}

}  // namespace

TimeWindowStats time_window_stats(const StudyDataset& ds, const RecruitmentForest& forest) {
  TimeWindowStats s;
  s.reach_day = summarize_reach(ds, false);
  s.reach_week = summarize_reach(ds, true);
  std::vector<int> coupon_days, gaps;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& r = ds[i];
    if (r.followup) {
      for (const auto& c : r.followup->coupons) {
        if (c.days_to_distribute) coupon_days.push_back(*c.days_to_distribute);
      }
    }
    const auto p = forest.parent(i);
    if (!p) continue;
    if (!r.interview_date || !ds[*p].interview_date) {
      ++s.gap_missing_dates;
      continue;
    }
    gaps.push_back(static_cast<int>((*r.interview_date - *ds[*p].interview_date).count()));
  }
  s.coupon_days = summarize_days(coupon_days);
  s.interview_gap = summarize_days(gaps);
  return s;
}

TestRetestStats test_retest_stats(const StudyDataset& ds, DegreeQuestion question) {
  TestRetestStats s;
  s.question = question;
  std::vector<double> diff;
  for (const auto& r : ds.respondents()) {
    if (!r.followup) continue;
    const auto a = r.degree.get(question);
    const auto b = r.followup->degree_retest.get(question);
    if (!a || !b) continue;
    s.test.push_back(*a);
    s.retest.push_back(*b);
    diff.push_back(static_cast<double>(*b) - *a);
  }
  s.n = diff.size();
  if (s.n < 2) fail(ErrorCode::InsufficientData, "fewer than two respondents with test and retest answers");
  s.median_difference = median(diff);
  s.q1_difference = quantile(diff, 0.25);
  s.q3_difference = quantile(diff, 0.75);
  s.spearman = spearman_rho(s.test, s.retest);
  return s;
}

SensitivityRow estimate_sensitivity(const StudyDataset& ds, const RecruitmentForest& forest,
                                    const TraitSelector& trait, DegreeQuestion question) {
  ds.trait_index(trait.trait);
  std::vector<Member> first, second;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& r = ds[i];
    if (!forest.parent(i) || !r.followup) continue;
    const auto v = ds.indicator(i, trait);
    const auto a = r.degree.get(question);
    const auto b = r.followup->degree_retest.get(question);
    if (!v || !a || !b || *a <= 0 || *b <= 0) continue;
    first.push_back(Member{*v, static_cast<double>(*a)});
    second.push_back(Member{*v, static_cast<double>(*b)});
  }
  if (first.empty()) {
    fail(ErrorCode::InsufficientData, trait.label + ": no respondent with usable degrees in both interviews");
  }
  SensitivityRow row;
  row.trait = trait.label;
  row.n = first.size();
  row.initial = vh_estimate(first);
  row.retest = vh_estimate(second);
  row.abs_difference = std::fabs(row.initial - row.retest);
  if (row.initial != 0.0) row.relative_difference = row.abs_difference / row.initial;
  return row;
}

SensitivityTable estimate_sensitivity_table(const StudyDataset& ds, const RecruitmentForest& forest,
                                            const std::vector<TraitSelector>& traits,
                                            DegreeQuestion question) {
  SensitivityTable t;
  for (const auto& sel : traits) {
    try {
      t.rows.push_back(estimate_sensitivity(ds, forest, sel, question));
    } catch (const Error& e) {
      if (e.family() != ErrorFamily::Analysis) throw;
      t.not_evaluable.push_back(sel.label + ": " + e.what());
    }
  }
  return t;
}

std::string_view to_string(TrendMethod m) noexcept {
  switch (m) {
    case TrendMethod::Linear: return "linear";
    case TrendMethod::LogLinear: return "log-linear";
    case TrendMethod::TheilSen: return "theil-sen";
    case TrendMethod::KendallTau: return "kendall-tau";
    case TrendMethod::SpearmanRho: return "spearman-rho";
  }
  return "linear";
}

TrendMethod trend_method_from_string(std::string_view text) {
  for (auto m : all_trend_methods()) {
    if (to_string(m) == text) return m;
  }
  fail(ErrorCode::InvalidConfig, "unknown trend method '" + std::string(text) + "'");
}

const std::vector<TrendMethod>& all_trend_methods() {
  static const std::vector<TrendMethod> v{TrendMethod::Linear, TrendMethod::LogLinear, TrendMethod::TheilSen,
                                          TrendMethod::KendallTau, TrendMethod::SpearmanRho};
  return v;
}

DegreeTrend degree_trend(const StudyDataset& ds, const std::vector<TrendMethod>& methods,
                         DegreeQuestion question) {
  DegreeTrend t;
  for (const auto& r : ds.respondents()) {
    const auto d = r.degree.get(question);
    if (!d) continue;
    t.order.push_back(r.interview_order);
    t.degree.push_back(*d);
  }
  if (t.order.size() < 3) fail(ErrorCode::InsufficientData, "fewer than three respondents report a degree");
  for (auto m : methods) {
    TrendVerdict v;
    v.method = m;
    v.n = t.order.size();
    switch (m) {
      case TrendMethod::Linear:
        v.statistic = least_squares(t.order, t.degree).slope;
        break;
      case TrendMethod::LogLinear: {
        std::vector<double> x, y;
        for (std::size_t i = 0; i < t.order.size(); ++i) {
          if (t.degree[i] <= 0) {
            ++v.excluded;
            continue;
          }
          x.push_back(t.order[i]);
          y.push_back(std::log(t.degree[i]));
        }
        v.n = x.size();
        if (x.size() < 2) fail(ErrorCode::InsufficientData, "log-linear fit needs two positive degrees");
        v.statistic = least_squares(x, y).slope;
        break;
      }
      case TrendMethod::TheilSen:
        v.statistic = theil_sen_slope(t.order, t.degree);
        break;
      case TrendMethod::KendallTau:
        v.statistic = kendall_tau_b(t.order, t.degree).value_or(0.0);
        break;
      case TrendMethod::SpearmanRho:
        v.statistic = spearman_rho(t.order, t.degree).value_or(0.0);
        break;
    }
    v.sign = sign_of(v.statistic);
    t.verdicts.push_back(v);
  }
  return t;
}

std::string trend_csv(const DegreeTrend& trend) {
  CsvTable t;
  t.header = {"method", "sign", "statistic", "n", "excluded"};
  for (const auto& v : trend.verdicts) {
    t.rows.push_back({std::string(to_string(v.method)), std::to_string(v.sign), fmt_num(v.statistic),
                      std::to_string(v.n), std::to_string(v.excluded)});
  }
  return to_csv(t);
}

std::string sensitivity_csv(const SensitivityTable& table) {
  CsvTable t;
  t.header = {"trait", "n", "estimate_initial", "estimate_retest", "abs_difference", "relative_difference"};
  for (const auto& r : table.rows) {
    t.rows.push_back({r.trait, std::to_string(r.n), fmt_num(r.initial), fmt_num(r.retest), fmt_num(r.abs_difference),
                      r.relative_difference ? fmt_num(*r.relative_difference) : "NA"});
  }
  return to_csv(t);
}

}  // namespace rdsdiag
