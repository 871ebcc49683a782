#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rdsdiag/behavior.hpp"
#include "rdsdiag/bottleneck.hpp"
#include "rdsdiag/convergence.hpp"
#include "rdsdiag/dataset.hpp"
#include "rdsdiag/degree.hpp"
#include "rdsdiag/estimators.hpp"
#include "rdsdiag/finitepop.hpp"
#include "rdsdiag/forest.hpp"

namespace rdsdiag {

struct PlotStyle {
  double width = 720.0;
  double height = 420.0;
  std::string title;
  std::string positive_color = "#d7301f";
  std::string negative_color = "#2b8cbe";
  std::string missing_color = "#bdbdbd";
  std::string line_color = "#252525";
  std::string flag_color = "#e31a1c";
  double font_size = 11.0;
};

struct ChainsData {
  std::vector<std::string> ids;
  std::vector<std::optional<std::size_t>> parent;
  std::vector<int> wave;
  std::vector<std::size_t> roots;
  std::vector<std::vector<std::size_t>> children;
  std::vector<std::optional<bool>> positive;  // node colouring, may be empty
};

ChainsData chains_data(const StudyDataset& ds, const RecruitmentForest& forest,
                       const std::optional<TraitSelector>& trait = {});

// Leaf-order tidy layout: every leaf gets its own column, parents sit at the
// mean of their children. Subtrees occupy disjoint column ranges, so edges
// never cross. x in columns, y in waves.
struct NodePosition {
  double x = 0.0;
  double y = 0.0;
};
std::vector<NodePosition> chains_layout(const ChainsData& data);

struct AllPointsData {
  std::string label;
  std::vector<AllPointsRow> rows;
  std::size_t trees = 0;
};

struct FlagGrid {
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;
  std::vector<std::vector<std::optional<bool>>> cells;  // [row][column], nullopt: not evaluable
};

struct EffectivenessData {
  std::vector<EffectivenessResult> rows;
};

struct BiasPlotData {
  std::vector<std::pair<std::string, BiasLevels>> sites;
};

struct MotivationOutcomeData {
  std::vector<MotivationOutcome> rows;
};

struct SensitivityPairsData {
  std::vector<SensitivityRow> rows;
};

using PlotInput = std::variant<ChainsData, EstimateSeries, BottleneckPlotData, AllPointsData, FlagGrid,
                               EffectivenessData, BiasPlotData, MotivationOutcomeData, SensitivityPairsData,
                               ParticipantsKnownTrend, DegreeTrend>;

// chains, convergence, bottleneck, all-points, flag-grid, effectiveness, bias,
// motivation-outcome, sensitivity-pairs, participants-known, degree-trend.
const std::vector<std::string>& plot_kinds();

// UnknownKind for an unrecognised kind or data of the wrong type, EmptyData
// when there is nothing to draw.
std::string render_plot(std::string_view kind, const PlotInput& data, const PlotStyle& style = {});

}  // namespace rdsdiag
