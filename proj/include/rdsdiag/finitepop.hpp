#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rdsdiag/dataset.hpp"
#include "rdsdiag/forest.hpp"

namespace rdsdiag {

// n < target. MissingTarget when no target is recorded.
bool attainment_indicator(const StudyDataset& ds);

struct FailedAttempts {
  std::size_t answered = 0;
  std::size_t with_failures = 0;
  double fraction = 0.0;
  double percent = 0.0;
  bool flagged = false;  // fraction >= threshold
  std::array<std::size_t, 3> bands{};  // 0, 1-3, 4+
};

// NoData when no follow-up respondent answered.
FailedAttempts failed_attempts_indicator(const StudyDataset& ds, double threshold = 0.25);

struct KnownPoint {
  std::size_t respondent = 0;
  std::size_t tree = 0;  // root ordinal
  int interview_order = 0;
  double proportion = 0.0;
};

struct ParticipantsKnownTrend {
  double slope = 0.0;
  double intercept = 0.0;
  bool flagged = false;  // slope > 0
  std::vector<KnownPoint> points;
  std::size_t excluded_zero_contacts = 0;
  std::size_t excluded_missing = 0;
  std::size_t truncations = 0;
};

// Known-participant counts truncated first, then the proportion of contacts
// already participating regressed on interview order.
ParticipantsKnownTrend participants_known_trend(const StudyDataset& ds, const RecruitmentForest& forest);

struct FinitePopConfig {
  double failed_attempts_threshold = 0.25;
};

struct IndicatorSummary {
  std::string site;
  std::optional<bool> attainment_failed;  // nullopt: not evaluable
  std::optional<bool> failed_attempts_flag;
  std::optional<bool> participants_known_trend_flag;
  std::vector<std::string> notes;
};

IndicatorSummary indicator_summary(const StudyDataset& ds, const RecruitmentForest& forest,
                                   const FinitePopConfig& cfg = {});

// X when flagged, blank when not, an em-dash column marker when not evaluable.
std::string indicator_grid_csv(const std::vector<IndicatorSummary>& rows);

inline constexpr const char* kNotEvaluableCell = "—";

}  // namespace rdsdiag
