#include "rdsdiag/finitepop.hpp"

#include "rdsdiag/csv.hpp"
#include "rdsdiag/error.hpp"
#include "rdsdiag/stats.hpp"

namespace rdsdiag {

bool attainment_indicator(const StudyDataset& ds) {
  if (!ds.target_sample_size()) fail(ErrorCode::MissingTarget, "no target sample size recorded");
  return static_cast<long long>(ds.size()) < *ds.target_sample_size();
}

FailedAttempts failed_attempts_indicator(const StudyDataset& ds, double threshold) {
  FailedAttempts f;
  for (const auto& r : ds.respondents()) {
    if (!r.followup || !r.followup->n_failed_attempts) continue;
    const int k = *r.followup->n_failed_attempts;
    ++f.answered;
    if (k >= 1) ++f.with_failures;
    ++f.bands[k == 0 ? 0 : (k <= 3 ? 1 : 2)];
  }
  if (f.answered == 0) fail(ErrorCode::NoData, "no follow-up respondent answered the failed-attempts question");
  f.fraction = static_cast<double>(f.with_failures) / static_cast<double>(f.answered);
  f.percent = 100.0 * f.fraction;
  f.flagged = f.fraction >= threshold;
  return f;
}

ParticipantsKnownTrend participants_known_trend(const StudyDataset& ds, const RecruitmentForest& forest) {
  const auto validated = validate_dataset(ds);
  const StudyDataset& clean = validated.repaired;
  ParticipantsKnownTrend t;
  t.truncations = validated.report.truncations;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const auto& r = clean[i];
    if (!r.followup) continue;
    if (r.degree.age && *r.degree.age <= 0) {
      ++t.excluded_zero_contacts;
      continue;
    }
    if (!r.followup->n_known_participants || !r.degree.age) {
      ++t.excluded_missing;
      continue;
    }
    KnownPoint p;
    p.respondent = i;
    p.tree = forest.tree_index(forest.tree_of(i));
    p.interview_order = r.interview_order;
    p.proportion = static_cast<double>(*r.followup->n_known_participants) / *r.degree.age;
    t.points.push_back(p);
    x.push_back(p.interview_order);
    y.push_back(p.proportion);
  }
  if (t.points.size() < 2) fail(ErrorCode::InsufficientData, "fewer than two usable known-participant answers");
  const auto fit = least_squares(x, y);
  t.slope = fit.slope;
  t.intercept = fit.intercept;
  t.flagged = t.slope > 0.0;
  return t;
}

IndicatorSummary indicator_summary(const StudyDataset& ds, const RecruitmentForest& forest,
                                   const FinitePopConfig& cfg) {
  IndicatorSummary s;
  s.site = ds.site_label();
  auto attempt = [&](auto&& f, std::optional<bool>& slot) {
    try {
      slot = f();
    } catch (const Error& e) {
      if (e.family() != ErrorFamily::Analysis) throw;
      s.notes.emplace_back(e.what());
    }
  };
  attempt([&] { return attainment_indicator(ds); }, s.attainment_failed);
  attempt([&] { return failed_attempts_indicator(ds, cfg.failed_attempts_threshold).flagged; },
          s.failed_attempts_flag);
  attempt([&] { return participants_known_trend(ds, forest).flagged; }, s.participants_known_trend_flag);
  return s;
}

std::string indicator_grid_csv(const std::vector<IndicatorSummary>& rows) {
  CsvTable t;
  t.header = {"site", "attainment_failed", "failed_attempts", "participants_known_trend"};
  auto cell = [](const std::optional<bool>& v) -> std::string {
    if (!v) return kNotEvaluableCell;
    return *v ? "X" : "";
  };
  for (const auto& r : rows) {
    t.rows.push_back({r.site, cell(r.attainment_failed), cell(r.failed_attempts_flag),
                      cell(r.participants_known_trend_flag)});
  }
  return to_csv(t);
}

}  // namespace rdsdiag
