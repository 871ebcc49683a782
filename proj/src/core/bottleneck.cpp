#include "rdsdiag/bottleneck.hpp"

#include <algorithm>
#include <unordered_map>

#include "rdsdiag/csv.hpp"
#include "rdsdiag/error.hpp"
#include "rdsdiag/format.hpp"
#include "rdsdiag/rng.hpp"
#include "rdsdiag/stats.hpp"

namespace rdsdiag {

double wsd(const std::vector<TreeEstimate>& per_tree, double overall) {
  double s = 0.0;
  for (const auto& t : per_tree) {
    const double d = t.estimate - overall;
    s += static_cast<double>(t.n) * d * d;
  }
  return s;
}

namespace {

struct Layout {
  std::vector<std::size_t> tree;   // tree slot per included observation
  std::vector<double> weight;      // 1 / degree
  std::vector<char> label;
  std::size_t trees = 0;
  std::vector<std::size_t> count;  // n_s per slot
};

Layout layout_for(const StudyDataset& ds, const RecruitmentForest& forest, const TraitSelector& trait,
                  DegreeQuestion degree) {
  const auto inc = included_observations(ds, trait, degree);
  Layout l;
  l.trees = forest.roots().size();
  l.count.assign(l.trees, 0);
  std::unordered_map<std::size_t, std::size_t> slot;
  for (std::size_t k = 0; k < forest.roots().size(); ++k) slot[forest.roots()[k]] = k;
  for (const auto& o : inc.observations) {
    const std::size_t s = slot[forest.tree_of(o.respondent)];
    l.tree.push_back(s);
    l.weight.push_back(1.0 / o.degree);
    l.label.push_back(o.has_trait ? 1 : 0);
    ++l.count[s];
  }
  return l;
}

double wsd_of(const Layout& l, const std::vector<char>& labels, std::vector<double>& num,
              std::vector<double>& den) {
  std::fill(num.begin(), num.end(), 0.0);
  std::fill(den.begin(), den.end(), 0.0);
  double total_num = 0.0, total_den = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    den[l.tree[i]] += l.weight[i];
    total_den += l.weight[i];
    if (labels[i]) {
      num[l.tree[i]] += l.weight[i];
      total_num += l.weight[i];
    }
  }
  const double overall = total_num / total_den;
  double s = 0.0;
  for (std::size_t t = 0; t < l.trees; ++t) {
    if (l.count[t] == 0) continue;
    const double d = num[t] / den[t] - overall;
    s += static_cast<double>(l.count[t]) * d * d;
  }
  return s;
}

}  // namespace

PermutationResult wsd_permutation_test(const StudyDataset& ds, const RecruitmentForest& forest,
                                       const TraitSelector& trait, const BottleneckConfig& cfg,
                                       DegreeQuestion degree) {
  if (cfg.replicates < 1) fail(ErrorCode::InvalidConfig, "replicates must be >= 1");
  const Layout l = layout_for(ds, forest, trait, degree);
  const auto nonempty = std::count_if(l.count.begin(), l.count.end(), [](std::size_t c) { return c > 0; });
  if (nonempty < 2) {
    fail(ErrorCode::TooFewTrees, trait.label + ": " + std::to_string(nonempty) +
                                     " tree(s) with included respondents, need 2");
  }

  std::vector<double> num(l.trees), den(l.trees);
  PermutationResult r;
  r.observed = wsd_of(l, l.label, num, den);
  r.replicates = cfg.replicates;
  r.threshold = cfg.threshold;
  r.rng_seed = cfg.rng_seed;

  std::vector<double> reps(cfg.replicates);
  parallel_for(cfg.replicates, [&](std::size_t k) {
    Rng rng = make_rng(cfg.rng_seed, k);
    std::vector<char> labels = l.label;
    shuffle_in_place(labels, rng);
    std::vector<double> n2(l.trees), d2(l.trees);
    reps[k] = wsd_of(l, labels, n2, d2);
  });
  const auto below = std::count_if(reps.begin(), reps.end(), [&](double v) { return v < r.observed; });
  r.quantile_rank = static_cast<double>(below) / static_cast<double>(cfg.replicates);
  r.flagged = r.quantile_rank > cfg.threshold;
  r.replicate_mean = mean(reps);
  r.replicate_q90 = quantile(reps, 0.9);
  return r;
}

std::vector<AllPointsRow> all_points_data(const StudyDataset& ds, const RecruitmentForest& forest,
                                          const TraitSelector& trait, DegreeQuestion degree) {
  const auto inc = included_observations(ds, trait, degree);
  std::vector<AllPointsRow> rows;
  for (std::size_t k = 0; k < inc.observations.size(); ++k) {
    const auto& o = inc.observations[k];
    rows.push_back(AllPointsRow{o.respondent, forest.tree_index(forest.tree_of(o.respondent)), k + 1,
                                ds[o.respondent].interview_order, o.has_trait});
  }
  return rows;
}

BottleneckPlotData bottleneck_plot_data(const StudyDataset& ds, const RecruitmentForest& forest,
                                        const TraitSelector& trait, DegreeQuestion degree) {
  const auto inc = included_observations(ds, trait, degree);
  BottleneckPlotData p;
  p.label = trait.label;
  p.length = inc.observations.size();
  p.trees.resize(forest.roots().size());
  std::vector<double> num(p.trees.size(), 0.0), den(p.trees.size(), 0.0);
  for (std::size_t k = 0; k < p.trees.size(); ++k) {
    p.trees[k].root = forest.roots()[k];
    p.trees[k].seed_has_trait = ds.indicator(forest.roots()[k], trait);
  }
  double tn = 0.0, td = 0.0;
  for (std::size_t k = 0; k < inc.observations.size(); ++k) {
    const auto& o = inc.observations[k];
    const std::size_t t = forest.tree_index(forest.tree_of(o.respondent));
    const double w = 1.0 / o.degree;
    den[t] += w;
    td += w;
    if (o.has_trait) {
      num[t] += w;
      tn += w;
    }
    p.trees[t].index.push_back(k + 1);
    p.trees[t].values.push_back(num[t] / den[t]);
  }
  p.overall = td > 0 ? tn / td : 0.0;
  return p;
}

std::vector<BottleneckRow> bottleneck_batch(const StudyDataset& ds, const RecruitmentForest& forest,
                                            const std::vector<TraitSelector>& traits,
                                            const BottleneckConfig& cfg, DegreeQuestion degree) {
  std::vector<BottleneckRow> rows;
  for (std::size_t i = 0; i < traits.size(); ++i) {
    BottleneckRow row;
    row.label = traits[i].label;
    BottleneckConfig c = cfg;
    // one stream family per trait, stable under reordering of other traits
    c.rng_seed = derive_seed(cfg.rng_seed, stable_hash(traits[i].label));
    try {
      row.result = wsd_permutation_test(ds, forest, traits[i], c, degree);
    } catch (const Error& e) {
      if (e.family() != ErrorFamily::Analysis) throw;
      row.reason = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string bottleneck_csv(const std::vector<BottleneckRow>& rows) {
  CsvTable t;
  t.header = {"trait", "status", "observed_wsd", "quantile_rank", "replicates", "threshold", "rng_seed"};
  for (const auto& r : rows) {
    if (!r.result) {
      t.rows.push_back({r.label, "not_evaluable", "", "", "", "", ""});
      continue;
    }
    const auto& p = *r.result;
    t.rows.push_back({r.label, p.flagged ? "flagged" : "ok", fmt_num(p.observed), fmt_num(p.quantile_rank),
                      std::to_string(p.replicates), fmt_num(p.threshold), std::to_string(p.rng_seed)});
  }
  return to_csv(t);
}

}  // namespace rdsdiag
