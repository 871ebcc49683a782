#include "rdsdiag/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "rdsdiag/csv.hpp"
#include "rdsdiag/error.hpp"

namespace rdsdiag {

// ---------------------------------------------------------------------------
// small value types

Date parse_date(std::string_view text) {
  int y = 0;
  unsigned m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    fail(ErrorCode::ParseError, "bad date '" + std::string(text) + "'");
  }
  auto parse = [&](std::string_view part, auto& out) {
    auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    if (ec != std::errc() || p != part.data() + part.size()) {
      fail(ErrorCode::ParseError, "bad date '" + std::string(text) + "'");
    }
  };
  parse(text.substr(0, 4), y);
  parse(text.substr(5, 2), m);
  parse(text.substr(8, 2), d);
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) fail(ErrorCode::ParseError, "invalid date '" + std::string(text) + "'");
  return Date{ymd};
}

std::string format_date(Date date) {
  const std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string_view to_string(DegreeQuestion q) noexcept {
  switch (q) {
    case DegreeQuestion::Know: return "know";
    case DegreeQuestion::Province: return "province";
    case DegreeQuestion::Age: return "age";
    case DegreeQuestion::SeenWeek: return "week";
  }
  return "week";
}

DegreeQuestion degree_question_from_string(std::string_view text) {
  if (text == "know") return DegreeQuestion::Know;
  if (text == "province") return DegreeQuestion::Province;
  if (text == "age") return DegreeQuestion::Age;
  if (text == "week" || text == "seen_week") return DegreeQuestion::SeenWeek;
  fail(ErrorCode::InvalidConfig, "unknown degree question '" + std::string(text) + "'");
}

Count DegreeReport::get(DegreeQuestion q) const noexcept {
  switch (q) {
    case DegreeQuestion::Know: return know;
    case DegreeQuestion::Province: return province;
    case DegreeQuestion::Age: return age;
    case DegreeQuestion::SeenWeek: return seen_week;
  }
  return seen_week;
}

bool DegreeReport::funnel_violated() const noexcept {
  const Count chain[] = {know, province, age, seen_week};
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (chain[i] && chain[j] && *chain[i] < *chain[j]) return true;
    }
  }
  return false;
}

bool reach_week_inconsistent(const DegreeReport& d) noexcept {
  return d.reach_week && d.age && *d.reach_week > *d.age;
}

bool reach_day_inconsistent(const DegreeReport& d) noexcept {
  return d.reach_day && d.age && *d.reach_day > *d.age;
}

// ---------------------------------------------------------------------------
// structural normalization, shared by the constructor (strict) and the
// lenient loader (repairs recorded as warnings)

namespace {

class Issues {
 public:
  Issues(bool strict, std::vector<std::string>* warnings) : strict_(strict), warnings_(warnings) {}

  // Strict mode throws; lenient mode records the repair and returns.
  void raise(ErrorCode code, const std::string& message) {
    if (strict_) fail(code, message);
    if (warnings_) warnings_->push_back(std::string(to_string(code)) + ": " + message + " (repaired)");
  }

 private:
  bool strict_;
  std::vector<std::string>* warnings_;
};

void check_count(Count& value, const std::string& what, const std::string& id, Issues& issues) {
  if (value && *value < 0) {
    issues.raise(ErrorCode::ParseError, "negative " + what + " for respondent " + id);
    value.reset();
  }
}

void check_degree(DegreeReport& d, const std::string& prefix, const std::string& id,
                  Issues& issues) {
  check_count(d.know, prefix + "know", id, issues);
  check_count(d.province, prefix + "province", id, issues);
  check_count(d.age, prefix + "age", id, issues);
  check_count(d.seen_week, prefix + "week", id, issues);
  check_count(d.reach_day, prefix + "reach_day", id, issues);
  check_count(d.reach_week, prefix + "reach_week", id, issues);
  check_count(d.receive_week, prefix + "receive_week", id, issues);
}

void normalize_traits(std::vector<TraitSpec>& traits, std::vector<Respondent>& rs,
                      Issues& issues, std::vector<std::string>* warnings) {
  for (auto& r : rs) r.traits.resize(traits.size());

  std::set<std::string> seen;
  std::vector<bool> keep(traits.size(), true);
  for (std::size_t t = 0; t < traits.size(); ++t) {
    if (traits[t].name.empty()) fail(ErrorCode::InvalidTrait, "trait with empty name");
    if (!seen.insert(traits[t].name).second) {
      issues.raise(ErrorCode::InvalidTrait, "duplicate trait '" + traits[t].name + "'");
      keep[t] = false;
    }
  }
  if (std::find(keep.begin(), keep.end(), false) != keep.end()) {
    std::vector<TraitSpec> kept;
    for (std::size_t t = 0; t < traits.size(); ++t) {
      if (keep[t]) kept.push_back(traits[t]);
    }
    for (auto& r : rs) {
      std::vector<std::optional<std::string>> values;
      for (std::size_t t = 0; t < traits.size(); ++t) {
        if (keep[t]) values.push_back(r.traits[t]);
      }
      r.traits = std::move(values);
    }
    traits = std::move(kept);
  }

  for (std::size_t t = 0; t < traits.size(); ++t) {
    auto& spec = traits[t];
    if (spec.reference_level.empty()) {
      fail(ErrorCode::InvalidTrait, "trait '" + spec.name + "' has no reference level");
    }
    std::set<std::string> levels;
    for (const auto& r : rs) {
      if (r.traits[t]) levels.insert(*r.traits[t]);
    }
    if (spec.kind == TraitKind::Binary && levels.size() > 2) {
      issues.raise(ErrorCode::InvalidTrait, "binary trait '" + spec.name + "' has " +
                                                std::to_string(levels.size()) + " levels");
      spec.kind = TraitKind::Categorical;
    }
    if (!levels.empty() && !levels.count(spec.reference_level) && warnings) {
      warnings->push_back("reference level '" + spec.reference_level + "' of trait '" +
                          spec.name + "' is never observed");
    }
  }
}

void normalize_followup(Respondent& r, int allotment, Issues& issues) {
  if (!r.followup) return;
  auto& fu = *r.followup;
  check_degree(fu.degree_retest, "fu_deg_", r.id, issues);
  check_count(fu.n_failed_attempts, "n_failed_attempts", r.id, issues);
  check_count(fu.n_known_participants, "n_known_participants", r.id, issues);
  check_count(fu.n_coupons_distributed, "n_coupons_distributed", r.id, issues);
  check_count(fu.n_refusals, "n_refusals", r.id, issues);
  check_count(fu.n_contacts_employed, "n_contacts_employed", r.id, issues);
  for (auto& c : fu.coupons) check_count(c.days_to_distribute, "days_to_distribute", r.id, issues);
  if (fu.coupons.size() > static_cast<std::size_t>(allotment)) {
    issues.raise(ErrorCode::InvalidFollowUp, "respondent " + r.id + " reports " +
                                                 std::to_string(fu.coupons.size()) +
                                                 " coupons, allotment is " +
                                                 std::to_string(allotment));
    fu.coupons.resize(static_cast<std::size_t>(allotment));
  }
  if (fu.refusal_reasons.size() > kMaxRefusalReasons) {
    issues.raise(ErrorCode::InvalidFollowUp,
                 "respondent " + r.id + " reports more than 5 refusal reasons");
    fu.refusal_reasons.resize(kMaxRefusalReasons);
  }
}

void normalize(std::vector<TraitSpec>& traits, std::vector<Respondent>& rs, int allotment,
               bool strict, std::vector<std::string>* warnings) {
  if (allotment < 1) fail(ErrorCode::InvalidConfig, "coupon allotment must be >= 1");
  if (rs.empty()) fail(ErrorCode::MissingData, "dataset has zero respondents");
  Issues issues(strict, warnings);

  // ids
  {
    std::unordered_set<std::string> ids;
    std::vector<Respondent> kept;
    kept.reserve(rs.size());
    for (auto& r : rs) {
      if (r.id.empty()) fail(ErrorCode::ParseError, "respondent with empty id");
      if (!ids.insert(r.id).second) {
        issues.raise(ErrorCode::DuplicateId, "duplicate respondent id '" + r.id + "'");
        continue;
      }
      kept.push_back(std::move(r));
    }
    rs = std::move(kept);
  }

  // interview order must be exactly 1..n
  {
    std::vector<int> orders;
    orders.reserve(rs.size());
    for (const auto& r : rs) orders.push_back(r.interview_order);
    std::sort(orders.begin(), orders.end());
    bool contiguous = true;
    for (std::size_t i = 0; i < orders.size(); ++i) {
      if (orders[i] != static_cast<int>(i) + 1) contiguous = false;
    }
    if (!contiguous) {
      issues.raise(ErrorCode::NonContiguousOrder, "interview_order is not a permutation of 1.." +
                                                      std::to_string(rs.size()));
    }
    std::stable_sort(rs.begin(), rs.end(), [](const Respondent& a, const Respondent& b) {
      return a.interview_order < b.interview_order;
    });
    for (std::size_t i = 0; i < rs.size(); ++i) rs[i].interview_order = static_cast<int>(i) + 1;
  }

  for (auto& r : rs) {
    check_degree(r.degree, "deg_", r.id, issues);
    normalize_followup(r, allotment, issues);
  }

  // coupons issued: pairwise disjoint
  std::unordered_map<std::string, std::size_t> issuer;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    auto& out = rs[i].coupons_out;
    std::vector<std::string> kept;
    for (auto& c : out) {
      if (c.empty()) continue;
      if (!issuer.emplace(c, i).second) {
        issues.raise(ErrorCode::DuplicateCoupon, "coupon '" + c + "' issued more than once");
        continue;
      }
      kept.push_back(std::move(c));
    }
    out = std::move(kept);
  }

  // coupons redeemed: must exist, at most once, from an earlier respondent
  std::unordered_set<std::string> redeemed;
  std::vector<std::optional<std::size_t>> parent(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    auto& r = rs[i];
    if (!r.coupon_in) continue;
    if (r.coupon_in->empty()) {
      r.coupon_in.reset();
      continue;
    }
    auto it = issuer.find(*r.coupon_in);
    if (it == issuer.end()) {
      issues.raise(ErrorCode::DanglingCoupon,
                   "respondent " + r.id + " redeemed coupon '" + *r.coupon_in + "' issued by nobody");
      r.coupon_in.reset();
      continue;
    }
    if (!redeemed.insert(*r.coupon_in).second) {
      issues.raise(ErrorCode::DuplicateCoupon, "coupon '" + *r.coupon_in + "' redeemed twice");
      r.coupon_in.reset();
      continue;
    }
    parent[i] = it->second;
  }

  // cycles (including self-recruitment)
  {
    std::vector<int> state(rs.size(), 0);  // 0 new, 1 on path, 2 done
    for (std::size_t start = 0; start < rs.size(); ++start) {
      std::vector<std::size_t> path;
      std::size_t v = start;
      while (state[v] == 0) {
        state[v] = 1;
        path.push_back(v);
        if (!parent[v]) break;
        v = *parent[v];
      }
      if (state[v] == 1 && parent[v]) {
        // v closes a loop; break it at the latest-interviewed member
        std::size_t latest = v;
        std::size_t u = v;
        do {
          latest = std::max(latest, u);
          u = *parent[u];
        } while (u != v);
        issues.raise(ErrorCode::CycleDetected,
                     "recruitment cycle through respondent " + rs[latest].id);
        rs[latest].coupon_in.reset();
        parent[latest].reset();
      }
      for (auto p : path) state[p] = 2;
    }
  }

  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (parent[i] && *parent[i] > i) {
      issues.raise(ErrorCode::OrderViolation, "respondent " + rs[i].id +
                                                  " was interviewed before their recruiter " +
                                                  rs[*parent[i]].id);
      rs[i].coupon_in.reset();
      parent[i].reset();
    }
  }

  normalize_traits(traits, rs, issues, warnings);
}

}  // namespace

// ---------------------------------------------------------------------------
// StudyDataset

StudyDataset::StudyDataset(std::string site_label, std::optional<int> target_sample_size,
                           std::vector<TraitSpec> trait_specs, std::vector<Respondent> respondents,
                           int coupon_allotment)
    : site_label_(std::move(site_label)),
      target_(target_sample_size),
      allotment_(coupon_allotment),
      traits_(std::move(trait_specs)),
      respondents_(std::move(respondents)) {
  normalize(traits_, respondents_, allotment_, /*strict=*/true, nullptr);
}

std::size_t StudyDataset::seed_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(respondents_.begin(), respondents_.end(),
                                                [](const Respondent& r) { return r.is_seed(); }));
}

std::optional<std::size_t> StudyDataset::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < respondents_.size(); ++i) {
    if (respondents_[i].id == id) return i;
  }
  return std::nullopt;
}

std::size_t StudyDataset::trait_index(std::string_view name) const {
  for (std::size_t t = 0; t < traits_.size(); ++t) {
    if (traits_[t].name == name) return t;
  }
  fail(ErrorCode::UnknownTrait, "no trait named '" + std::string(name) + "'");
}

std::vector<std::string> StudyDataset::observed_levels(std::size_t t) const {
  std::set<std::string> levels;
  for (const auto& r : respondents_) {
    if (r.traits[t]) levels.insert(*r.traits[t]);
  }
  return {levels.begin(), levels.end()};
}

TraitSelector StudyDataset::selector(std::string_view trait, std::optional<std::string> level) const {
  const std::size_t t = trait_index(trait);
  const auto& spec = traits_[t];
  TraitSelector sel;
  sel.trait = spec.name;
  sel.trait_index = t;
  sel.level = level.value_or(spec.reference_level);
  sel.label = (spec.kind == TraitKind::Binary && sel.level == spec.reference_level)
                  ? spec.name
                  : spec.name + "=" + sel.level;
  return sel;
}

std::vector<TraitSelector> StudyDataset::selectors_for(std::string_view trait) const {
  const std::size_t t = trait_index(trait);
  if (traits_[t].kind == TraitKind::Binary) return {selector(trait)};
  std::vector<TraitSelector> out;
  for (auto& level : observed_levels(t)) out.push_back(selector(trait, level));
  return out;
}

std::vector<TraitSelector> StudyDataset::all_selectors() const {
  std::vector<TraitSelector> out;
  for (const auto& spec : traits_) {
    for (auto& s : selectors_for(spec.name)) out.push_back(std::move(s));
  }
  return out;
}

std::optional<bool> StudyDataset::indicator(std::size_t respondent, const TraitSelector& sel) const {
  const auto& value = respondents_.at(respondent).traits.at(sel.trait_index);
  if (!value) return std::nullopt;
  return *value == sel.level;
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace {

struct FieldReader {
  const CsvTable& table;
  const std::vector<std::string>& row;
  std::size_t line;
  Issues& issues;

  std::string text(std::optional<std::size_t> col) const {
    return col ? row[*col] : std::string();
  }

  std::string where(std::optional<std::size_t> col) const {
    return "line " + std::to_string(line) + " column '" + (col ? table.header[*col] : "?") + "'";
  }

  Count count(std::optional<std::size_t> col) const {
    const std::string s = text(col);
    if (s.empty()) return std::nullopt;
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      issues.raise(ErrorCode::ParseError, "non-integer '" + s + "' at " + where(col));
      return std::nullopt;
    }
    if (v < 0) {
      issues.raise(ErrorCode::ParseError, "negative count at " + where(col));
      return std::nullopt;
    }
    return v;
  }

  YesNo yes_no(std::optional<std::size_t> col) const {
    std::string s = text(col);
    if (s.empty()) return std::nullopt;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "yes" || s == "y" || s == "1" || s == "true") return true;
    if (s == "no" || s == "n" || s == "0" || s == "false") return false;
    issues.raise(ErrorCode::ParseError, "expected yes/no, got '" + s + "' at " + where(col));
    return std::nullopt;
  }

  std::optional<std::string> optional_text(std::optional<std::size_t> col) const {
    std::string s = text(col);
    if (s.empty()) return std::nullopt;
    return s;
  }

  std::optional<Date> date(std::optional<std::size_t> col) const {
    const std::string s = text(col);
    if (s.empty()) return std::nullopt;
    try {
      return parse_date(s);
    } catch (const Error&) {
      issues.raise(ErrorCode::ParseError, "bad date '" + s + "' at " + where(col));
      return std::nullopt;
    }
  }
};

std::optional<std::size_t> require(const CsvTable& t, std::string_view name, std::string_view file) {
  auto col = t.column(name);
  if (!col) fail(ErrorCode::MissingColumn, std::string(file) + " lacks column '" + std::string(name) + "'");
  return col;
}

// Columns named prefix1, prefix2, ... in numeric order.
std::vector<std::size_t> numbered_columns(const CsvTable& t, std::string_view prefix) {
  std::vector<std::pair<int, std::size_t>> found;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    const auto& h = t.header[i];
    if (h.size() <= prefix.size() || h.compare(0, prefix.size(), prefix) != 0) continue;
    int k = 0;
    auto [p, ec] = std::from_chars(h.data() + prefix.size(), h.data() + h.size(), k);
    if (ec == std::errc() && p == h.data() + h.size()) found.emplace_back(k, i);
  }
  std::sort(found.begin(), found.end());
  std::vector<std::size_t> cols;
  for (auto& f : found) cols.push_back(f.second);
  return cols;
}

std::vector<TraitSpec> parse_traits(const CsvTable& t) {
  const auto name = require(t, "name", "traits file");
  const auto kind = require(t, "kind", "traits file");
  const auto ref = require(t, "reference_level", "traits file");
  std::vector<TraitSpec> specs;
  for (const auto& row : t.rows) {
    TraitSpec s;
    s.name = row[*name];
    if (row[*kind] == "binary") {
      s.kind = TraitKind::Binary;
    } else if (row[*kind] == "categorical") {
      s.kind = TraitKind::Categorical;
    } else {
      fail(ErrorCode::ParseError, "trait kind must be binary or categorical, got '" + row[*kind] + "'");
    }
    s.reference_level = row[*ref];
    specs.push_back(std::move(s));
  }
  return specs;
}

DegreeReport read_degree(const FieldReader& f, const CsvTable& t, const std::string& prefix) {
  DegreeReport d;
  d.know = f.count(t.column(prefix + "deg_know"));
  d.province = f.count(t.column(prefix + "deg_province"));
  d.age = f.count(t.column(prefix + "deg_age"));
  d.seen_week = f.count(t.column(prefix + "deg_week"));
  d.reach_day = f.count(t.column(prefix + "reach_day"));
  d.reach_week = f.count(t.column(prefix + "reach_week"));
  d.receive_week = f.count(t.column(prefix + "receive_week"));
  return d;
}

std::vector<Respondent> parse_respondents(const CsvTable& t, const std::vector<TraitSpec>& traits,
                                          Issues& issues) {
  if (t.header.empty() || t.rows.empty()) fail(ErrorCode::MissingData, "respondents file has zero respondents");
  const auto id = require(t, "id", "respondents file");
  const auto coupon_in = require(t, "coupon_in", "respondents file");
  const auto order = require(t, "interview_order", "respondents file");
  const auto date = require(t, "interview_date", "respondents file");
  for (const char* c : {"deg_know", "deg_province", "deg_age", "deg_week"}) require(t, c, "respondents file");
  const auto outs = numbered_columns(t, "coupon_out_");
  std::vector<std::size_t> trait_cols;
  for (const auto& s : traits) trait_cols.push_back(*require(t, "trait:" + s.name, "respondents file"));

  std::vector<Respondent> rs;
  rs.reserve(t.rows.size());
  for (std::size_t line = 0; line < t.rows.size(); ++line) {
    const auto& row = t.rows[line];
    FieldReader f{t, row, line + 2, issues};
    Respondent r;
    r.id = row[*id];
    r.coupon_in = f.optional_text(coupon_in);
    for (auto c : outs) {
      if (!row[c].empty()) r.coupons_out.push_back(row[c]);
    }
    {
      const std::string& s = row[*order];
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), r.interview_order);
      if (s.empty() || ec != std::errc() || p != s.data() + s.size()) {
        fail(ErrorCode::ParseError, "bad interview_order '" + s + "' on line " + std::to_string(line + 2));
      }
    }
    r.interview_date = f.date(date);
    r.degree = read_degree(f, t, "");
    r.motivation = f.optional_text(t.column("motivation"));
    r.employed = f.yes_no(t.column("employed"));
    for (auto c : trait_cols) r.traits.push_back(f.optional_text(c));
    rs.push_back(std::move(r));
  }
  return rs;
}

void attach_followup(const CsvTable& t, std::vector<Respondent>& rs, Issues& issues) {
  if (t.header.empty()) return;
  const auto id = require(t, "id", "followup file");
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < rs.size(); ++i) by_id.emplace(rs[i].id, i);
  const auto reasons = numbered_columns(t, "refusal_reason_");
  const auto coupon_ids = numbered_columns(t, "coupon_id_");

  for (std::size_t line = 0; line < t.rows.size(); ++line) {
    const auto& row = t.rows[line];
    FieldReader f{t, row, line + 2, issues};
    auto it = by_id.find(row[*id]);
    if (it == by_id.end()) {
      issues.raise(ErrorCode::UnknownId, "follow-up for unknown respondent '" + row[*id] + "'");
      continue;
    }
    auto& r = rs[it->second];
    if (r.followup) {
      issues.raise(ErrorCode::DuplicateId, "second follow-up row for '" + row[*id] + "'");
      continue;
    }
    FollowUpRecord fu;
    fu.degree_retest = read_degree(f, t, "fu_");
    fu.n_failed_attempts = f.count(t.column("n_failed_attempts"));
    fu.n_known_participants = f.count(t.column("n_known_participants"));
    fu.n_coupons_distributed = f.count(t.column("n_coupons_distributed"));
    fu.n_refusals = f.count(t.column("n_refusals"));
    fu.n_contacts_employed = f.count(t.column("n_contacts_employed"));
    for (auto c : reasons) {
      if (!row[c].empty()) fu.refusal_reasons.push_back(row[c]);
    }
    for (auto c : coupon_ids) {
      const std::string j = t.header[c].substr(std::string("coupon_id_").size());
      const auto days = t.column("days_" + j);
      const auto recip = t.column("recip_" + j);
      const auto empl = t.column("recipient_employed_" + j);
      if (row[c].empty() && f.text(days).empty() && f.text(recip).empty() && f.text(empl).empty()) continue;
      CouponOutcome o;
      o.coupon_id = row[c];
      o.days_to_distribute = f.count(days);
      o.reciprocation_answer = f.yes_no(recip);
      o.recipient_employed = f.yes_no(empl);
      fu.coupons.push_back(std::move(o));
    }
    r.followup = std::move(fu);
  }
}

}  // namespace

LoadResult parse_dataset(std::string_view respondents_csv, std::optional<std::string_view> followup_csv,
                         std::string_view traits_csv, const IngestOptions& options) {
  std::vector<std::string> warnings;
  Issues issues(options.strict, &warnings);
  auto traits = parse_traits(parse_csv(traits_csv));
  auto rs = parse_respondents(parse_csv(respondents_csv), traits, issues);
  if (followup_csv) attach_followup(parse_csv(*followup_csv), rs, issues);
  normalize(traits, rs, options.coupon_allotment, options.strict, &warnings);
  return LoadResult{StudyDataset(options.site_label, options.target_sample_size, std::move(traits),
                                 std::move(rs), options.coupon_allotment),
                    std::move(warnings)};
}

LoadResult load_dataset(const std::filesystem::path& respondents_file,
                        const std::optional<std::filesystem::path>& followup_file,
                        const std::filesystem::path& traits_file, const IngestOptions& options) {
  auto read_input = [](const std::filesystem::path& p) {
    try {
      return read_text_file(p);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::FileNotFound) throw;
      fail(ErrorCode::MissingInput, "cannot open input " + p.string());
    }
  };
  const std::string respondents = read_input(respondents_file);
  const std::string traits = read_input(traits_file);
  std::optional<std::string> followup;
  if (followup_file) followup = read_input(*followup_file);
  return parse_dataset(respondents, followup ? std::optional<std::string_view>(*followup) : std::nullopt,
                       traits, options);
}

// ---------------------------------------------------------------------------
// serialization

namespace {

std::string cell(const Count& c) { return c ? std::to_string(*c) : std::string(); }
std::string cell(const YesNo& b) { return b ? (*b ? "yes" : "no") : ""; }
std::string cell(const std::optional<std::string>& s) { return s.value_or(""); }

void degree_cells(std::vector<std::string>& row, const DegreeReport& d) {
  row.push_back(cell(d.know));
  row.push_back(cell(d.province));
  row.push_back(cell(d.age));
  row.push_back(cell(d.seen_week));
  row.push_back(cell(d.reach_day));
  row.push_back(cell(d.reach_week));
  row.push_back(cell(d.receive_week));
}

}  // namespace

DatasetFiles serialize_dataset(const StudyDataset& ds) {
  std::size_t k_out = static_cast<std::size_t>(ds.coupon_allotment());
  std::size_t k_fu = static_cast<std::size_t>(ds.coupon_allotment());
  for (const auto& r : ds.respondents()) {
    k_out = std::max(k_out, r.coupons_out.size());
    if (r.followup) k_fu = std::max(k_fu, r.followup->coupons.size());
  }

  CsvTable resp;
  resp.header = {"id", "coupon_in"};
  for (std::size_t k = 1; k <= k_out; ++k) resp.header.push_back("coupon_out_" + std::to_string(k));
  for (const char* h : {"interview_order", "interview_date", "deg_know", "deg_province", "deg_age",
                        "deg_week", "reach_day", "reach_week", "receive_week", "motivation", "employed"}) {
    resp.header.emplace_back(h);
  }
  for (const auto& s : ds.trait_specs()) resp.header.push_back("trait:" + s.name);

  CsvTable fu;
  fu.header = {"id",           "fu_deg_know",   "fu_deg_province", "fu_deg_age",
               "fu_deg_week",  "fu_reach_day",  "fu_reach_week",   "fu_receive_week",
               "n_failed_attempts", "n_known_participants", "n_coupons_distributed", "n_refusals"};
  for (std::size_t k = 1; k <= kMaxRefusalReasons; ++k) fu.header.push_back("refusal_reason_" + std::to_string(k));
  fu.header.emplace_back("n_contacts_employed");
  for (std::size_t j = 1; j <= k_fu; ++j) {
    const auto s = std::to_string(j);
    fu.header.push_back("coupon_id_" + s);
    fu.header.push_back("days_" + s);
    fu.header.push_back("recip_" + s);
    fu.header.push_back("recipient_employed_" + s);
  }

  for (const auto& r : ds.respondents()) {
    std::vector<std::string> row{r.id, cell(r.coupon_in)};
    for (std::size_t k = 0; k < k_out; ++k) row.push_back(k < r.coupons_out.size() ? r.coupons_out[k] : "");
    row.push_back(std::to_string(r.interview_order));
    row.push_back(r.interview_date ? format_date(*r.interview_date) : "");
    degree_cells(row, r.degree);
    row.push_back(cell(r.motivation));
    row.push_back(cell(r.employed));
    for (const auto& v : r.traits) row.push_back(cell(v));
    resp.rows.push_back(std::move(row));

    if (!r.followup) continue;
    const auto& f = *r.followup;
    std::vector<std::string> frow{r.id};
    degree_cells(frow, f.degree_retest);
    frow.push_back(cell(f.n_failed_attempts));
    frow.push_back(cell(f.n_known_participants));
    frow.push_back(cell(f.n_coupons_distributed));
    frow.push_back(cell(f.n_refusals));
    for (std::size_t k = 0; k < kMaxRefusalReasons; ++k) {
      frow.push_back(k < f.refusal_reasons.size() ? f.refusal_reasons[k] : "");
    }
    frow.push_back(cell(f.n_contacts_employed));
    for (std::size_t j = 0; j < k_fu; ++j) {
      if (j < f.coupons.size()) {
        const auto& c = f.coupons[j];
        frow.push_back(c.coupon_id);
        frow.push_back(cell(c.days_to_distribute));
        frow.push_back(cell(c.reciprocation_answer));
        frow.push_back(cell(c.recipient_employed));
      } else {
        frow.insert(frow.end(), 4, "");
      }
    }
    fu.rows.push_back(std::move(frow));
  }

  CsvTable traits;
  traits.header = {"name", "kind", "reference_level"};
  for (const auto& s : ds.trait_specs()) {
    traits.rows.push_back({s.name, s.kind == TraitKind::Binary ? "binary" : "categorical", s.reference_level});
  }
  return DatasetFiles{to_csv(resp), to_csv(fu), to_csv(traits)};
}

void write_dataset(const StudyDataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto files = serialize_dataset(ds);
  write_text_file(dir / "respondents.csv", files.respondents_csv);
  write_text_file(dir / "followup.csv", files.followup_csv);
  write_text_file(dir / "traits.csv", files.traits_csv);
}

// ---------------------------------------------------------------------------
// validation

bool ValidationReport::clean() const noexcept {
  const bool traits_complete = std::all_of(missing_traits.begin(), missing_traits.end(),
                                           [](const TraitMissing& m) { return m.missing == 0; });
  return funnel_violations == 0 && retest_funnel_violations == 0 && truncations == 0 &&
         known_participants_cleared == 0 && inconsistent_reach_week == 0 &&
         inconsistent_reach_day == 0 && traits_complete;
}

ValidationResult validate_dataset(const StudyDataset& ds) {
  ValidationReport rep;
  std::vector<Respondent> rs = ds.respondents();

  for (std::size_t t = 0; t < ds.trait_specs().size(); ++t) {
    TraitMissing m{ds.trait_specs()[t].name, 0};
    for (const auto& r : rs) m.missing += r.traits[t] ? 0 : 1;
    rep.missing_traits.push_back(m);
    const auto levels = ds.observed_levels(t);
    if (!levels.empty() &&
        std::find(levels.begin(), levels.end(), ds.trait_specs()[t].reference_level) == levels.end()) {
      rep.notes.push_back("reference level of '" + ds.trait_specs()[t].name + "' never observed");
    }
  }

  for (std::size_t i = 0; i < rs.size(); ++i) {
    auto& r = rs[i];
    if (r.degree.funnel_violated()) ++rep.funnel_violations;
    const bool week_bad = reach_week_inconsistent(r.degree);
    const bool day_bad = reach_day_inconsistent(r.degree);
    rep.inconsistent_reach_week += week_bad;
    rep.inconsistent_reach_day += day_bad;
    if (week_bad || day_bad) rep.inconsistent_respondents.push_back(i);

    if (!r.followup) continue;
    auto& fu = *r.followup;
    if (fu.degree_retest.funnel_violated()) ++rep.retest_funnel_violations;
    if (fu.n_known_participants && r.degree.age) {
      const int age = *r.degree.age;
      if (age <= 0) {
        fu.n_known_participants.reset();
        ++rep.known_participants_cleared;
      } else if (*fu.n_known_participants > age - 1) {
        fu.n_known_participants = age - 1;
        ++rep.truncations;
      }
    }
  }

  StudyDataset repaired(ds.site_label(), ds.target_sample_size(), ds.trait_specs(), std::move(rs),
                        ds.coupon_allotment());
  return ValidationResult{std::move(rep), std::move(repaired)};
}

}  // namespace rdsdiag
