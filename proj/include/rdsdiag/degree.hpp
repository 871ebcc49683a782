#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rdsdiag/dataset.hpp"
#include "rdsdiag/forest.hpp"

namespace rdsdiag {

struct ReachSummary {
  double mean_proportion = 0.0;  // NaN when nobody qualifies
  std::size_t used = 0;
  std::size_t excluded_inconsistent = 0;  // reach > contacts
  std::size_t excluded_missing = 0;       // no answer, or zero contacts
};

struct DayDistribution {
  std::map<int, std::size_t> counts;  // days -> occurrences
  std::size_t total = 0;
  double within_1_day = 0.0;   // fraction <= 1 day, NaN when empty
  double within_7_days = 0.0;  // fraction <= 7 days
  double median = 0.0;
};

struct TimeWindowStats {
  ReachSummary reach_day;
  ReachSummary reach_week;
  DayDistribution coupon_days;
  DayDistribution interview_gap;
  std::size_t gap_missing_dates = 0;
};

TimeWindowStats time_window_stats(const StudyDataset& ds, const RecruitmentForest& forest);

struct TestRetestStats {
  DegreeQuestion question = DegreeQuestion::SeenWeek;
  std::size_t n = 0;
  double median_difference = 0.0;  // retest - test
  double q1_difference = 0.0;
  double q3_difference = 0.0;
  std::optional<double> spearman;  // nullopt when either side is constant
  std::vector<double> test;
  std::vector<double> retest;
};

// InsufficientData with fewer than two paired answers.
TestRetestStats test_retest_stats(const StudyDataset& ds, DegreeQuestion question = DegreeQuestion::SeenWeek);

struct SensitivityRow {
  std::string trait;
  std::size_t n = 0;
  double initial = 0.0;
  double retest = 0.0;
  double abs_difference = 0.0;
  std::optional<double> relative_difference;  // nullopt when initial == 0
};

// Same respondents (non-seed, both interviews, both degrees positive, trait
// present) under each degree measurement. InsufficientData when none remain.
SensitivityRow estimate_sensitivity(const StudyDataset& ds, const RecruitmentForest& forest,
                                    const TraitSelector& trait,
                                    DegreeQuestion question = DegreeQuestion::SeenWeek);

struct SensitivityTable {
  std::vector<SensitivityRow> rows;
  std::vector<std::string> not_evaluable;
};

SensitivityTable estimate_sensitivity_table(const StudyDataset& ds, const RecruitmentForest& forest,
                                            const std::vector<TraitSelector>& traits,
                                            DegreeQuestion question = DegreeQuestion::SeenWeek);

enum class TrendMethod { Linear, LogLinear, TheilSen, KendallTau, SpearmanRho };

std::string_view to_string(TrendMethod m) noexcept;
TrendMethod trend_method_from_string(std::string_view text);
const std::vector<TrendMethod>& all_trend_methods();

struct TrendVerdict {
  TrendMethod method = TrendMethod::Linear;
  int sign = 0;
  double statistic = 0.0;
  std::size_t n = 0;
  std::size_t excluded = 0;  // zero degrees for the log-linear fit
};

struct DegreeTrend {
  std::vector<TrendVerdict> verdicts;
  std::vector<double> order;
  std::vector<double> degree;
};

// Degree against interview order. InsufficientData below three respondents.
DegreeTrend degree_trend(const StudyDataset& ds, const std::vector<TrendMethod>& methods,
                         DegreeQuestion question = DegreeQuestion::SeenWeek);

std::string trend_csv(const DegreeTrend& trend);
std::string sensitivity_csv(const SensitivityTable& table);

}  // namespace rdsdiag
