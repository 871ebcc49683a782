#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rdsdiag/dataset.hpp"
#include "rdsdiag/estimators.hpp"
#include "rdsdiag/forest.hpp"

namespace rdsdiag {

struct ConvergenceConfig {
  std::size_t tau = 50;
  double epsilon = 0.02;
};

struct ConvergenceVerdict {
  bool flagged = false;
  std::optional<std::size_t> first_violation_offset;  // smallest t with deviation > epsilon
  double max_deviation = 0.0;
  std::size_t window = 0;  // number of offsets examined
};

// Window t = 1 .. min(tau-1, m-1) over series indices. EmptySeries on m == 0.
ConvergenceVerdict convergence_flag(const std::vector<double>& values, const ConvergenceConfig& cfg);
ConvergenceVerdict convergence_flag(const EstimateSeries& series, const ConvergenceConfig& cfg);

struct ConvergenceRow {
  std::string label;
  std::optional<ConvergenceVerdict> verdict;  // nullopt: not evaluable
  std::string reason;
  EstimateSeries series;
};

std::vector<ConvergenceRow> convergence_batch(const StudyDataset& ds, const RecruitmentForest& forest,
                                              const std::vector<TraitSelector>& traits,
                                              const ConvergenceConfig& cfg,
                                              DegreeQuestion degree = DegreeQuestion::SeenWeek);

std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

}  // namespace rdsdiag
