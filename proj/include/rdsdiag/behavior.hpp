#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdsdiag/bottleneck.hpp"
#include "rdsdiag/dataset.hpp"
#include "rdsdiag/fisher.hpp"
#include "rdsdiag/forest.hpp"

namespace rdsdiag {

struct ReciprocationResult {
  double percent = 0.0;
  std::size_t yes = 0;
  std::size_t answered = 0;
  std::size_t unanswered = 0;
};

// Share of answered coupon outcomes where the recipient would have given the
// recruiter a coupon. NoData when nothing was answered.
ReciprocationResult reciprocation_rate(const StudyDataset& ds);

struct NetworkReciprocity {
  std::vector<std::size_t> respondents;
  std::vector<double> normalized_difference;  // |receive - give| / max(receive, give)
  std::size_t excluded_zero = 0;               // both answers zero
  std::size_t missing = 0;                      // either answer absent
  std::size_t equal = 0;
  std::size_t give_more = 0;
  std::size_t receive_more = 0;
  double median = 0.0;  // NaN when no respondent qualifies
  double mean = 0.0;
  double q3 = 0.0;
};

NetworkReciprocity network_reciprocity_stats(const StudyDataset& ds);

struct EffectivenessResult {
  std::string label;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
  double mean_positive = 0.0;  // NaN when the group is empty
  double mean_negative = 0.0;
  std::optional<double> ratio;  // positive / negative, nullopt when undefined
};

// Mean recruits (forest children) by trait group, seeds included.
EffectivenessResult recruitment_effectiveness(const StudyDataset& ds, const RecruitmentForest& forest,
                                              const TraitSelector& trait);

// One recruiter's answers at the three levels.
struct BiasRecruiter {
  std::size_t respondent = 0;
  int contacts = 0;             // age-restricted contact count
  int contacts_positive = 0;    // of which employed
  int recipients = 0;           // coupon recipients with an answer
  int recipients_positive = 0;
  int recruits = 0;             // recruits with a recorded answer
  int recruits_positive = 0;
};

// Recruiters with data at all three levels.
std::vector<BiasRecruiter> bias_recruiters(const StudyDataset& ds, const RecruitmentForest& forest);

struct BiasLevels {
  double contacts_level = 0.0;
  double recipients_level = 0.0;
  double recruits_level = 0.0;
  std::size_t n_recruiters = 0;
  std::size_t excluded_inconsistent = 0;  // more employed contacts than contacts
};

// NoEligibleRecruiters when no recruiter qualifies.
BiasLevels recruitment_bias_levels(const StudyDataset& ds, const RecruitmentForest& forest);

struct BiasTest {
  std::string level;                        // coupon_passing, returning_coupons, overall
  std::optional<PermutationResult> result;  // nullopt when no consistent recruiter remains
  double expected = 0.0;                    // null mean of the statistic
  std::size_t evaluated = 0;
  std::size_t inconsistent = 0;
  double inconsistent_proportion = 0.0;
};

struct BiasTests {
  std::vector<BiasTest> tests;  // the three levels in order
  std::size_t n_recruiters = 0;
};

// Simple random sampling from each recruiter's reported composition.
BiasTests recruitment_bias_tests(const StudyDataset& ds, const RecruitmentForest& forest,
                                 std::size_t replicates = 10000, std::uint64_t rng_seed = 1,
                                 double threshold = 0.90);

struct NonResponseRates {
  double coupon_refusal = 0.0;
  double non_return = 0.0;
  double total_non_response = 0.0;
  std::size_t n_recruiters = 0;
  long long refusals = 0;
  long long distributed = 0;
  long long returned = 0;
  std::vector<std::string> impossible;  // recruiters with more recruits than coupons distributed
};

// S is follow-up completers who answered both coupon questions. Recruits come
// from the forest. NoData when S is empty or no coupon was distributed.
NonResponseRates nonresponse_rates(const StudyDataset& ds, const RecruitmentForest& forest);

struct ReasonRow {
  std::string category;
  std::size_t count = 0;
  double percent = 0.0;
};

struct ReasonTable {
  std::string site;
  std::vector<ReasonRow> rows;
  std::size_t total = 0;
};

const std::vector<std::string>& refusal_categories();
const std::vector<std::string>& motivation_categories();

ReasonTable refusal_reason_table(const StudyDataset& ds);
ReasonTable motivation_table(const StudyDataset& ds);

// Rows are categories, columns are sites (percent, then count).
std::string reason_tables_csv(const std::vector<ReasonTable>& tables);

struct MotivationOutcome {
  std::string motivation;
  std::string outcome;
  int a = 0, b = 0, c = 0, d = 0;  // motivated x outcome, see fisher.hpp
  OddsRatioResult odds_ratio;
};

MotivationOutcome motivation_outcome(const StudyDataset& ds, const std::string& motivation_category,
                                     const TraitSelector& outcome, double confidence = 0.95);

std::string reciprocation_csv(const std::vector<std::pair<std::string, ReciprocationResult>>& sites);
std::string nonresponse_csv(const std::vector<std::pair<std::string, NonResponseRates>>& sites);

}  // namespace rdsdiag
