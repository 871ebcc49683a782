#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rdsdiag/bottleneck.hpp"
#include "rdsdiag/convergence.hpp"
#include "rdsdiag/dataset.hpp"
#include "rdsdiag/kvconfig.hpp"

namespace rdsdiag {

inline constexpr const char* kBundleSchemaVersion = "1.0";

enum class Section { Dataset, Estimate, Convergence, Bottleneck, Behavior, Degree, FinitePop };

std::string_view to_string(Section s) noexcept;
Section section_from_string(std::string_view text);
const std::vector<Section>& all_sections();

struct PipelineConfig {
  std::filesystem::path respondents;
  std::optional<std::filesystem::path> followup;
  std::filesystem::path traits;
  std::filesystem::path out_dir = "rdsdiag-report";

  std::uint64_t seed = 1;
  ConvergenceConfig convergence;
  std::size_t replicates = 10000;  // bottleneck permutations
  double threshold = 0.90;
  std::vector<double> population_sizes;  // SS scenarios; empty skips the SS/VH table
  std::size_t ss_replications = 2000;
  double ss_threshold = 0.01;
  std::size_t bias_replicates = 10000;
  double failed_attempts_threshold = 0.25;
  std::string motivation = "hiv_test";
  DegreeQuestion degree_question = DegreeQuestion::SeenWeek;

  bool strict = true;
  std::string site = "site";
  std::optional<int> target;
  int coupon_allotment = 3;

  std::set<Section> sections{all_sections().begin(), all_sections().end()};
  bool plots = true;
};

// Keys: respondents, followup, traits, out_dir, seed, tau, epsilon,
// replicates, threshold, population_size (comma list), ss_replications,
// ss_threshold, bias_replicates, failed_attempts_threshold, motivation,
// degree_question, strict, site, target, coupon_allotment, sections
// (comma list or "none"), plots. Unknown keys are rejected.
PipelineConfig pipeline_config_from_kv(const KvConfig& kv, PipelineConfig base = {});

// Everything a run produces, held in memory until written.
struct ReportBundle {
  std::string json;                           // bundle.json contents
  std::map<std::string, std::string> files;  // relative path -> contents, excluding bundle.json
};

// Loads the inputs named in the config. Ingestion and configuration errors
// propagate; analysis errors become not-evaluable entries.
ReportBundle run_pipeline(const PipelineConfig& cfg);
ReportBundle run_pipeline(const StudyDataset& ds, const PipelineConfig& cfg,
                          const std::vector<std::string>& ingest_warnings = {});

// Writes every file, then bundle.json last.
void write_bundle(const ReportBundle& bundle, const std::filesystem::path& out_dir);

std::string sha256_hex(std::string_view data);

}  // namespace rdsdiag
