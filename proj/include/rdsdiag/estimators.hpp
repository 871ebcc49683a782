#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdsdiag/dataset.hpp"
#include "rdsdiag/forest.hpp"

namespace rdsdiag {

struct Member {
  bool has_trait = false;
  double degree = 0.0;
};

// Inverse-degree weighted proportion. Throws EmptySample on no members and
// ZeroDegree when a degree is not positive.
double vh_estimate(const std::vector<Member>& members);

struct Observation {
  std::size_t respondent = 0;
  bool has_trait = false;
  int degree = 0;
};

struct IncludedSet {
  std::vector<Observation> observations;  // interview order
  std::size_t seeds = 0;
  std::size_t missing_trait = 0;
  std::size_t missing_degree = 0;
  std::size_t zero_degree = 0;
};

// Non-seed respondents with a trait value and a positive degree.
IncludedSet included_observations(const StudyDataset& ds, const TraitSelector& trait,
                                  DegreeQuestion degree = DegreeQuestion::SeenWeek);

std::vector<Member> to_members(const std::vector<Observation>& obs);

struct EstimateSeries {
  std::string label;
  std::vector<int> orders;
  std::vector<double> values;
  std::vector<bool> has_trait;

  bool empty() const noexcept { return values.empty(); }
  double final_value() const;  // throws EmptySample
};

EstimateSeries cumulative_estimates(const StudyDataset& ds, const RecruitmentForest& forest,
                                    const TraitSelector& trait,
                                    DegreeQuestion degree = DegreeQuestion::SeenWeek);

struct TreeEstimate {
  std::size_t root = 0;
  double estimate = 0.0;
  std::size_t n = 0;
};

// Trees with no included members are omitted.
std::vector<TreeEstimate> per_tree_estimates(const StudyDataset& ds, const RecruitmentForest& forest,
                                             const TraitSelector& trait,
                                             DegreeQuestion degree = DegreeQuestion::SeenWeek);

struct SSConfig {
  double population_size = 0.0;
  std::size_t replications = 2000;
  std::size_t max_iterations = 10;
  double tolerance = 1e-4;
  std::uint64_t rng_seed = 1;
};

struct SSWeights {
  std::vector<int> degree_classes;     // ascending
  std::vector<double> inclusion;       // per class
  std::vector<double> population;      // per class, working population N_k
  std::size_t iterations = 0;
  bool converged = false;
};

// Fixed point of the successive-sampling inclusion probabilities for the
// given sample degrees.
SSWeights ss_weights(const std::vector<int>& degrees, const SSConfig& cfg);

struct SSResult {
  double estimate = 0.0;
  std::size_t iterations = 0;
  bool converged = false;  // false: last iterate returned, see warning
  std::optional<std::string> warning;
};

SSResult ss_estimate(const std::vector<Observation>& obs, const SSConfig& cfg);
SSResult ss_estimate(const StudyDataset& ds, const TraitSelector& trait, const SSConfig& cfg,
                     DegreeQuestion degree = DegreeQuestion::SeenWeek);

struct SSCell {
  double population_size = 0.0;
  double ss = 0.0;
  double difference = 0.0;  // SS - VH
  bool converged = true;
};

struct SSVHRow {
  std::string trait;
  double vh = 0.0;
  std::vector<SSCell> scenarios;
  double max_abs_difference = 0.0;
  bool flagged = false;
};

struct SSVHTable {
  std::vector<SSVHRow> rows;
  std::vector<std::string> not_evaluable;  // "label: reason"
  double threshold = 0.01;
};

SSVHTable ss_vh_table(const StudyDataset& ds, const std::vector<TraitSelector>& traits,
                      const std::vector<SSConfig>& scenarios, double threshold = 0.01,
                      DegreeQuestion degree = DegreeQuestion::SeenWeek);

// trait, VH, then one column per scenario.
std::string ss_vh_csv(const SSVHTable& table);

}  // namespace rdsdiag
