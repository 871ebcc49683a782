#include "rdsdiag/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "rdsdiag/csv.hpp"
#include "rdsdiag/error.hpp"
#include "rdsdiag/format.hpp"
#include "rdsdiag/rng.hpp"
#include "rdsdiag/stats.hpp"

namespace rdsdiag {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

ReciprocationResult reciprocation_rate(const StudyDataset& ds) {
  ReciprocationResult r;
  for (const auto& resp : ds.respondents()) {
    if (!resp.followup) continue;
    for (const auto& c : resp.followup->coupons) {
      if (!c.reciprocation_answer) {
        ++r.unanswered;
        continue;
      }
      ++r.answered;
      r.yes += *c.reciprocation_answer ? 1 : 0;
    }
  }
  if (r.answered == 0) fail(ErrorCode::NoData, "no answered reciprocation questions");
  r.percent = 100.0 * static_cast<double>(r.yes) / static_cast<double>(r.answered);
  return r;
}

NetworkReciprocity network_reciprocity_stats(const StudyDataset& ds) {
  NetworkReciprocity out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& d = ds[i].degree;
    if (!d.receive_week || !d.reach_week) {
      ++out.missing;
      continue;
    }
    const int receive = *d.receive_week, give = *d.reach_week;
    const int top = std::max(receive, give);
    if (top == 0) {
      ++out.excluded_zero;
      continue;
    }
    if (receive == give) ++out.equal;
    if (give > receive) ++out.give_more;
    if (receive > give) ++out.receive_more;
    out.respondents.push_back(i);
    out.normalized_difference.push_back(std::abs(receive - give) / static_cast<double>(top));
  }
  if (out.normalized_difference.empty()) {
    out.median = out.mean = out.q3 = kNaN;
  } else {
    out.median = median(out.normalized_difference);
    out.mean = mean(out.normalized_difference);
    out.q3 = quantile(out.normalized_difference, 0.75);
  }
  return out;
}

EffectivenessResult recruitment_effectiveness(const StudyDataset& ds, const RecruitmentForest& forest,
                                              const TraitSelector& trait) {
  ds.trait_index(trait.trait);
  EffectivenessResult r;
  r.label = trait.label;
  double pos = 0.0, neg = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto v = ds.indicator(i, trait);
    if (!v) continue;
    const double k = static_cast<double>(forest.children(i).size());
    if (*v) {
      ++r.n_positive;
      pos += k;
    } else {
      ++r.n_negative;
      neg += k;
    }
  }
  r.mean_positive = r.n_positive ? pos / static_cast<double>(r.n_positive) : kNaN;
  r.mean_negative = r.n_negative ? neg / static_cast<double>(r.n_negative) : kNaN;
  if (r.n_positive && r.n_negative && r.mean_negative > 0.0) r.ratio = r.mean_positive / r.mean_negative;
  return r;
}

std::vector<BiasRecruiter> bias_recruiters(const StudyDataset& ds, const RecruitmentForest& forest) {
  std::vector<BiasRecruiter> out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& r = ds[i];
    if (!r.followup || !r.degree.age || *r.degree.age < 1 || !r.followup->n_contacts_employed) continue;
    BiasRecruiter b;
    b.respondent = i;
    b.contacts = *r.degree.age;
    b.contacts_positive = *r.followup->n_contacts_employed;
    for (const auto& c : r.followup->coupons) {
      if (!c.recipient_employed) continue;
      ++b.recipients;
      b.recipients_positive += *c.recipient_employed ? 1 : 0;
    }
    for (std::size_t child : forest.children(i)) {
      if (!ds[child].employed) continue;
      ++b.recruits;
      b.recruits_positive += *ds[child].employed ? 1 : 0;
    }
    if (b.recipients == 0 || b.recruits == 0) continue;
    out.push_back(b);
  }
  return out;
}

BiasLevels recruitment_bias_levels(const StudyDataset& ds, const RecruitmentForest& forest) {
  BiasLevels lv;
  double a = 0.0, b = 0.0, c = 0.0;
  for (const auto& r : bias_recruiters(ds, forest)) {
    if (r.contacts_positive > r.contacts) {
      ++lv.excluded_inconsistent;
      continue;
    }
    a += static_cast<double>(r.contacts_positive) / r.contacts;
    b += static_cast<double>(r.recipients_positive) / r.recipients;
    c += static_cast<double>(r.recruits_positive) / r.recruits;
    ++lv.n_recruiters;
  }
  if (lv.n_recruiters == 0) fail(ErrorCode::NoEligibleRecruiters, "no recruiter has data on all three levels");
  const double s = static_cast<double>(lv.n_recruiters);
  lv.contacts_level = a / s;
  lv.recipients_level = b / s;
  lv.recruits_level = c / s;
  return lv;
}

namespace {

// draws from a population of size pop with succ successes; observed successes
struct Urn {
  int pop = 0;
  int succ = 0;
  int draws = 0;
  int observed = 0;

  bool consistent() const noexcept {
    return pop >= 1 && succ >= 0 && succ <= pop && draws <= pop && observed <= succ &&
           observed <= draws && draws - observed <= pop - succ;
  }
};

int draw_hypergeometric(const Urn& u, Rng& rng) {
  int succ = u.succ, pop = u.pop, hits = 0;
  for (int k = 0; k < u.draws; ++k) {
    const bool hit = uniform_below(rng, static_cast<std::uint64_t>(pop)) < static_cast<std::uint64_t>(succ);
    hits += hit ? 1 : 0;
    succ -= hit ? 1 : 0;
    --pop;
  }
  return hits;
}

BiasTest run_level(const std::string& name, const std::vector<Urn>& urns, std::size_t replicates,
                   std::uint64_t seed, double threshold) {
  BiasTest t;
  t.level = name;
  std::vector<Urn> usable;
  for (const auto& u : urns) {
    if (u.consistent()) {
      usable.push_back(u);
    } else {
      ++t.inconsistent;
    }
  }
  t.evaluated = urns.size();
  t.inconsistent_proportion = urns.empty() ? 0.0 : static_cast<double>(t.inconsistent) / urns.size();
  if (usable.empty()) return t;
  double observed = 0.0;
  for (const auto& u : usable) {
    observed += u.observed;
    t.expected += static_cast<double>(u.draws) * u.succ / u.pop;
  }
  std::vector<double> reps(replicates);
  parallel_for(replicates, [&](std::size_t k) {
    Rng rng = make_rng(seed, k);
    long long s = 0;
    for (const auto& u : usable) s += draw_hypergeometric(u, rng);
    reps[k] = static_cast<double>(s);
  });
  PermutationResult p;
  p.observed = observed;
  p.replicates = replicates;
  p.threshold = threshold;
  p.rng_seed = seed;
  const auto below = std::count_if(reps.begin(), reps.end(), [&](double v) { return v < observed; });
  p.quantile_rank = static_cast<double>(below) / static_cast<double>(replicates);
  p.flagged = p.quantile_rank > threshold;
  p.replicate_mean = mean(reps);
  p.replicate_q90 = quantile(reps, 0.9);
  t.result = p;
  return t;
}

}  // namespace

BiasTests recruitment_bias_tests(const StudyDataset& ds, const RecruitmentForest& forest,
                                 std::size_t replicates, std::uint64_t rng_seed, double threshold) {
  if (replicates < 1) fail(ErrorCode::InvalidConfig, "replicates must be >= 1");
  const auto recruiters = bias_recruiters(ds, forest);
  if (recruiters.empty()) fail(ErrorCode::NoEligibleRecruiters, "no recruiter has data on all three levels");
  std::vector<Urn> passing, returning, overall;
  for (const auto& r : recruiters) {
    passing.push_back(Urn{r.contacts, r.contacts_positive, r.recipients, r.recipients_positive});
    returning.push_back(Urn{r.recipients, r.recipients_positive, r.recruits, r.recruits_positive});
    overall.push_back(Urn{r.contacts, r.contacts_positive, r.recruits, r.recruits_positive});
  }
  BiasTests out;
  out.n_recruiters = recruiters.size();
  out.tests.push_back(run_level("coupon_passing", passing, replicates, derive_seed(rng_seed, 1), threshold));
  out.tests.push_back(run_level("returning_coupons", returning, replicates, derive_seed(rng_seed, 2), threshold));
  out.tests.push_back(run_level("overall", overall, replicates, derive_seed(rng_seed, 3), threshold));
  return out;
}

NonResponseRates nonresponse_rates(const StudyDataset& ds, const RecruitmentForest& forest) {
  NonResponseRates out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& r = ds[i];
    if (!r.followup || !r.followup->n_coupons_distributed || !r.followup->n_refusals) continue;
    const long long c = *r.followup->n_coupons_distributed;
    const long long recruits = static_cast<long long>(forest.children(i).size());
    if (recruits > c) {
      out.impossible.push_back(r.id);
      continue;
    }
    out.refusals += *r.followup->n_refusals;
    out.distributed += c;
    out.returned += recruits;
    ++out.n_recruiters;
  }
  if (out.n_recruiters == 0 && !out.impossible.empty()) {
    fail(ErrorCode::ImpossibleCounts, "every recruiter has more recruits than coupons distributed (" +
                                          out.impossible.front() + ", ...)");
  }
  if (out.n_recruiters == 0) fail(ErrorCode::NoData, "no follow-up respondent answered the coupon questions");
  if (out.distributed == 0) fail(ErrorCode::NoData, "no coupons were reported distributed");
  const double r = static_cast<double>(out.refusals);
  const double c = static_cast<double>(out.distributed);
  const double R = static_cast<double>(out.returned);
  out.coupon_refusal = r / (r + c);
  out.non_return = 1.0 - R / c;
  // equals 1 - R / (r + c); the factored form keeps the identity exact
  out.total_non_response = 1.0 - (1.0 - out.coupon_refusal) * (1.0 - out.non_return);
  return out;
}

const std::vector<std::string>& refusal_categories() {
  static const std::vector<std::string> v{"too_busy",          "fear_identified", "incentive_low_location_far",
                                          "not_interested",    "fear_results",    "fear_blood",
                                          "fail_eligibility",  "already_got_coupon", "other"};
  return v;
}

const std::vector<std::string>& motivation_categories() {
  static const std::vector<std::string> v{"incentive", "hiv_test", "other_test", "recruiter", "study_interest", "other"};
  return v;
}

namespace {

ReasonTable tabulate(const std::string& site, const std::vector<std::string>& categories,
                     const std::vector<std::string>& values) {
  std::map<std::string, std::size_t> counts;
  for (const auto& v : values) ++counts[v];
  ReasonTable t;
  t.site = site;
  t.total = values.size();
  auto emit = [&](const std::string& cat) {
    const std::size_t n = counts.count(cat) ? counts[cat] : 0;
    const double pct = t.total ? 100.0 * static_cast<double>(n) / static_cast<double>(t.total) : 0.0;
    t.rows.push_back(ReasonRow{cat, n, pct});
  };
  for (const auto& c : categories) emit(c);
  for (const auto& [cat, n] : counts) {
    if (std::find(categories.begin(), categories.end(), cat) == categories.end()) emit(cat);
  }
  return t;
}

}  // namespace

ReasonTable refusal_reason_table(const StudyDataset& ds) {
  std::vector<std::string> values;
  for (const auto& r : ds.respondents()) {
    if (!r.followup) continue;
    values.insert(values.end(), r.followup->refusal_reasons.begin(), r.followup->refusal_reasons.end());
  }
  return tabulate(ds.site_label(), refusal_categories(), values);
}

ReasonTable motivation_table(const StudyDataset& ds) {
  std::vector<std::string> values;
  for (const auto& r : ds.respondents()) {
    if (r.motivation) values.push_back(*r.motivation);
  }
  return tabulate(ds.site_label(), motivation_categories(), values);
}

std::string reason_tables_csv(const std::vector<ReasonTable>& tables) {
  CsvTable t;
  t.header = {"category"};
  std::vector<std::string> cats;
  for (const auto& tab : tables) {
    t.header.push_back(tab.site);
    t.header.push_back(tab.site + "_n");
    for (const auto& row : tab.rows) {
      if (std::find(cats.begin(), cats.end(), row.category) == cats.end()) cats.push_back(row.category);
    }
  }
  for (const auto& cat : cats) {
    std::vector<std::string> row{cat};
    for (const auto& tab : tables) {
      auto it = std::find_if(tab.rows.begin(), tab.rows.end(), [&](const ReasonRow& r) { return r.category == cat; });
      row.push_back(it == tab.rows.end() ? "0" : fmt_num(it->percent));
      row.push_back(it == tab.rows.end() ? "0" : std::to_string(it->count));
    }
    t.rows.push_back(std::move(row));
  }
  std::vector<std::string> total{"total"};
  for (const auto& tab : tables) {
    total.push_back(tab.total ? "100" : "0");
    total.push_back(std::to_string(tab.total));
  }
  t.rows.push_back(std::move(total));
  return to_csv(t);
}

MotivationOutcome motivation_outcome(const StudyDataset& ds, const std::string& motivation_category,
                                     const TraitSelector& outcome, double confidence) {
  ds.trait_index(outcome.trait);
  MotivationOutcome m;
  m.motivation = motivation_category;
  m.outcome = outcome.label;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& mot = ds[i].motivation;
    const auto y = ds.indicator(i, outcome);
    if (!mot || !y) continue;
    const bool exposed = *mot == motivation_category;
    if (exposed && *y) ++m.a;
    if (exposed && !*y) ++m.b;
    if (!exposed && *y) ++m.c;
    if (!exposed && !*y) ++m.d;
  }
  m.odds_ratio = fisher_odds_ratio(m.a, m.b, m.c, m.d, confidence);
  return m;
}

std::string reciprocation_csv(const std::vector<std::pair<std::string, ReciprocationResult>>& sites) {
  CsvTable t;
  t.header = {"site", "percent_reciprocal", "yes", "answered"};
  for (const auto& [site, r] : sites) {
    t.rows.push_back({site, fmt_num(r.percent), std::to_string(r.yes), std::to_string(r.answered)});
  }
  return to_csv(t);
}

std::string nonresponse_csv(const std::vector<std::pair<std::string, NonResponseRates>>& sites) {
  CsvTable t;
  t.header = {"site", "coupon_refusal", "non_return", "total_non_response", "n_recruiters",
              "refusals", "distributed", "returned", "impossible_counts"};
  for (const auto& [site, r] : sites) {
    t.rows.push_back({site, fmt_num(r.coupon_refusal), fmt_num(r.non_return), fmt_num(r.total_non_response),
                      std::to_string(r.n_recruiters), std::to_string(r.refusals), std::to_string(r.distributed),
                      std::to_string(r.returned), std::to_string(r.impossible.size())});
  }
  return to_csv(t);
}

}  // namespace rdsdiag
