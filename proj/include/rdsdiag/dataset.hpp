#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rdsdiag {

using Count = std::optional<int>;
using YesNo = std::optional<bool>;
using Date = std::chrono::sys_days;

// ISO-8601 calendar date, YYYY-MM-DD.
Date parse_date(std::string_view text);
std::string format_date(Date date);

enum class TraitKind { Binary, Categorical };

struct TraitSpec {
  std::string name;
  TraitKind kind = TraitKind::Binary;
  std::string reference_level;  // the level counted as "has trait"

  bool operator==(const TraitSpec&) const = default;
};

// The degree question series, widest to narrowest. SeenWeek is the
// estimation degree.
enum class DegreeQuestion { Know, Province, Age, SeenWeek };

std::string_view to_string(DegreeQuestion q) noexcept;
DegreeQuestion degree_question_from_string(std::string_view text);

struct DegreeReport {
  Count know;
  Count province;
  Count age;         // "know you and you know them", 15+: the contact count
  Count seen_week;   // estimation degree
  Count reach_day;   // could give a coupon to by tomorrow
  Count reach_week;  // could give a coupon to by next week
  Count receive_week;  // could give *you* a coupon within a week

  Count get(DegreeQuestion q) const noexcept;
  // True when a present pair breaks know >= province >= age >= seen_week.
  bool funnel_violated() const noexcept;

  bool operator==(const DegreeReport&) const = default;
};

struct CouponOutcome {
  std::string coupon_id;
  Count days_to_distribute;
  YesNo reciprocation_answer;
  YesNo recipient_employed;

  bool operator==(const CouponOutcome&) const = default;
};

inline constexpr std::size_t kMaxRefusalReasons = 5;

struct FollowUpRecord {
  DegreeReport degree_retest;
  Count n_failed_attempts;
  Count n_known_participants;
  std::vector<CouponOutcome> coupons;
  Count n_coupons_distributed;
  Count n_refusals;
  std::vector<std::string> refusal_reasons;
  Count n_contacts_employed;

  bool operator==(const FollowUpRecord&) const = default;
};

struct Respondent {
  std::string id;
  std::optional<std::string> coupon_in;  // absent for seeds
  std::vector<std::string> coupons_out;
  int interview_order = 0;
  std::optional<Date> interview_date;
  DegreeReport degree;
  std::vector<std::optional<std::string>> traits;  // aligned with trait specs
  std::optional<std::string> motivation;
  YesNo employed;
  std::optional<FollowUpRecord> followup;

  bool is_seed() const noexcept { return !coupon_in.has_value(); }
  bool operator==(const Respondent&) const = default;
};

// Which trait, and which level of it counts as positive.
struct TraitSelector {
  std::string trait;
  std::string level;
  std::size_t trait_index = 0;
  std::string label;  // "name" for binary traits, "name=level" otherwise
};

// Immutable study data. Construction enforces every structural invariant and
// sorts respondents by interview order, so respondent index == order - 1.
class StudyDataset {
 public:
  StudyDataset(std::string site_label, std::optional<int> target_sample_size,
               std::vector<TraitSpec> trait_specs, std::vector<Respondent> respondents,
               int coupon_allotment = 3);

  const std::string& site_label() const noexcept { return site_label_; }
  std::optional<int> target_sample_size() const noexcept { return target_; }
  int coupon_allotment() const noexcept { return allotment_; }
  const std::vector<TraitSpec>& trait_specs() const noexcept { return traits_; }
  const std::vector<Respondent>& respondents() const noexcept { return respondents_; }
  std::size_t size() const noexcept { return respondents_.size(); }
  const Respondent& operator[](std::size_t i) const { return respondents_[i]; }

  std::size_t seed_count() const noexcept;
  std::optional<std::size_t> index_of(std::string_view id) const;
  std::size_t trait_index(std::string_view name) const;  // throws UnknownTrait

  // Binary traits select their reference level; categorical traits need a
  // level, otherwise every observed level is returned one-vs-rest.
  TraitSelector selector(std::string_view trait, std::optional<std::string> level = {}) const;
  std::vector<TraitSelector> selectors_for(std::string_view trait) const;
  std::vector<TraitSelector> all_selectors() const;
  std::vector<std::string> observed_levels(std::size_t trait_index) const;

  std::optional<bool> indicator(std::size_t respondent, const TraitSelector& sel) const;

  bool operator==(const StudyDataset&) const = default;

 private:
  std::string site_label_;
  std::optional<int> target_;
  int allotment_ = 3;
  std::vector<TraitSpec> traits_;
  std::vector<Respondent> respondents_;
};

struct IngestOptions {
  bool strict = true;
  std::string site_label = "site";
  std::optional<int> target_sample_size;
  int coupon_allotment = 3;
};

struct LoadResult {
  StudyDataset dataset;
  std::vector<std::string> warnings;  // lenient-mode repairs
};

LoadResult load_dataset(const std::filesystem::path& respondents_file,
                        const std::optional<std::filesystem::path>& followup_file,
                        const std::filesystem::path& traits_file,
                        const IngestOptions& options = {});

// Same, from in-memory CSV text.
LoadResult parse_dataset(std::string_view respondents_csv,
                         std::optional<std::string_view> followup_csv,
                         std::string_view traits_csv, const IngestOptions& options = {});

struct DatasetFiles {
  std::string respondents_csv;
  std::string followup_csv;
  std::string traits_csv;
};

DatasetFiles serialize_dataset(const StudyDataset& ds);
void write_dataset(const StudyDataset& ds, const std::filesystem::path& dir);

struct TraitMissing {
  std::string trait;
  std::size_t missing = 0;
};

struct ValidationReport {
  std::size_t funnel_violations = 0;          // initial interview
  std::size_t retest_funnel_violations = 0;   // follow-up interview
  std::size_t truncations = 0;                // known participants capped at age - 1
  std::size_t known_participants_cleared = 0; // age == 0, value unusable
  std::size_t inconsistent_reach_week = 0;     // reach_week > age
  std::size_t inconsistent_reach_day = 0;      // reach_day > age
  std::vector<TraitMissing> missing_traits;
  std::vector<std::size_t> inconsistent_respondents;  // either reach question
  std::vector<std::string> notes;

  bool clean() const noexcept;
};

struct ValidationResult {
  ValidationReport report;
  StudyDataset repaired;
};

ValidationResult validate_dataset(const StudyDataset& ds);

// Reach responses larger than the contact count are logically inconsistent.
bool reach_week_inconsistent(const DegreeReport& d) noexcept;
bool reach_day_inconsistent(const DegreeReport& d) noexcept;

}  // namespace rdsdiag
