#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdsdiag/dataset.hpp"
#include "rdsdiag/estimators.hpp"
#include "rdsdiag/forest.hpp"

namespace rdsdiag {

struct PermutationResult {
  double observed = 0.0;
  std::size_t replicates = 0;
  double quantile_rank = 0.0;  // fraction of replicates strictly below observed
  bool flagged = false;        // quantile_rank > threshold
  double threshold = 0.90;
  std::uint64_t rng_seed = 0;
  double replicate_mean = 0.0;
  double replicate_q90 = 0.0;
};

// Sum over trees of n_s (p_s - overall)^2. Empty input gives 0.
double wsd(const std::vector<TreeEstimate>& per_tree, double overall);

struct BottleneckConfig {
  std::size_t replicates = 10000;
  double threshold = 0.90;
  std::uint64_t rng_seed = 1;
};

// Degrees stay attached to sample positions; trait labels of included
// respondents are shuffled. TooFewTrees when fewer than two trees have
// included members.
PermutationResult wsd_permutation_test(const StudyDataset& ds, const RecruitmentForest& forest,
                                       const TraitSelector& trait, const BottleneckConfig& cfg,
                                       DegreeQuestion degree = DegreeQuestion::SeenWeek);

struct AllPointsRow {
  std::size_t respondent = 0;
  std::size_t tree = 0;    // ordinal of the root in the forest
  std::size_t index = 0;   // 1-based position among included respondents
  int interview_order = 0;
  bool has_trait = false;
};

std::vector<AllPointsRow> all_points_data(const StudyDataset& ds, const RecruitmentForest& forest,
                                          const TraitSelector& trait,
                                          DegreeQuestion degree = DegreeQuestion::SeenWeek);

// Per-tree cumulative estimates against the global included index, plus the
// seed's own trait value, for the bottleneck plot.
struct TreeTrack {
  std::size_t root = 0;
  std::optional<bool> seed_has_trait;
  std::vector<std::size_t> index;
  std::vector<double> values;
};

struct BottleneckPlotData {
  std::string label;
  std::vector<TreeTrack> trees;
  double overall = 0.0;
  std::size_t length = 0;
};

BottleneckPlotData bottleneck_plot_data(const StudyDataset& ds, const RecruitmentForest& forest,
                                        const TraitSelector& trait,
                                        DegreeQuestion degree = DegreeQuestion::SeenWeek);

struct BottleneckRow {
  std::string label;
  std::optional<PermutationResult> result;
  std::string reason;  // when not evaluable
};

std::vector<BottleneckRow> bottleneck_batch(const StudyDataset& ds, const RecruitmentForest& forest,
                                            const std::vector<TraitSelector>& traits,
                                            const BottleneckConfig& cfg,
                                            DegreeQuestion degree = DegreeQuestion::SeenWeek);

std::string bottleneck_csv(const std::vector<BottleneckRow>& rows);

}  // namespace rdsdiag
