#include "rdsdiag/convergence.hpp"

#include <algorithm>
#include <cmath>

#include "rdsdiag/csv.hpp"
#include "rdsdiag/error.hpp"
#include "rdsdiag/format.hpp"
#include "rdsdiag/rng.hpp"

namespace rdsdiag {

ConvergenceVerdict convergence_flag(const std::vector<double>& values, const ConvergenceConfig& cfg) {
  if (cfg.tau < 1) fail(ErrorCode::InvalidConfig, "tau must be >= 1");
  if (!(cfg.epsilon > 0.0)) fail(ErrorCode::InvalidConfig, "epsilon must be > 0");
  if (values.empty()) fail(ErrorCode::EmptySeries, "convergence of an empty series");
  const std::size_t m = values.size();
  const double last = values.back();
  ConvergenceVerdict v;
  v.window = std::min(cfg.tau - 1, m - 1);
  for (std::size_t t = 1; t <= v.window; ++t) {
    const double dev = std::fabs(values[m - 1 - t] - last);
    v.max_deviation = std::max(v.max_deviation, dev);
    if (dev > cfg.epsilon && !v.first_violation_offset) v.first_violation_offset = t;
  }
  v.flagged = v.first_violation_offset.has_value();
  return v;
}

ConvergenceVerdict convergence_flag(const EstimateSeries& series, const ConvergenceConfig& cfg) {
  return convergence_flag(series.values, cfg);
}

std::vector<ConvergenceRow> convergence_batch(const StudyDataset& ds, const RecruitmentForest& forest,
                                              const std::vector<TraitSelector>& traits,
                                              const ConvergenceConfig& cfg, DegreeQuestion degree) {
  std::vector<ConvergenceRow> rows(traits.size());
  parallel_for(traits.size(), [&](std::size_t i) {
    auto& row = rows[i];
    row.label = traits[i].label;
    row.series = cumulative_estimates(ds, forest, traits[i], degree);
    if (row.series.empty()) {
      row.reason = "EmptySeries: no included respondents";
      return;
    }
    row.verdict = convergence_flag(row.series, cfg);
  });
  return rows;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  CsvTable t;
  t.header = {"trait", "status", "final_estimate", "max_deviation", "first_violation_offset", "length"};
  for (const auto& r : rows) {
    if (!r.verdict) {
      t.rows.push_back({r.label, "not_evaluable", "", "", "", "0"});
      continue;
    }
    const auto& v = *r.verdict;
    t.rows.push_back({r.label, v.flagged ? "flagged" : "ok", fmt_num(r.series.final_value()),
                      fmt_num(v.max_deviation),
                      v.first_violation_offset ? std::to_string(*v.first_violation_offset) : "",
                      std::to_string(r.series.values.size())});
  }
  return to_csv(t);
}

}  // namespace rdsdiag
