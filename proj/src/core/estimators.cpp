#include "rdsdiag/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "rdsdiag/csv.hpp"
#include "rdsdiag/error.hpp"
#include "rdsdiag/format.hpp"
#include "rdsdiag/rng.hpp"

namespace rdsdiag {

double vh_estimate(const std::vector<Member>& members) {
  if (members.empty()) fail(ErrorCode::EmptySample, "no members to estimate from");
  double num = 0.0, den = 0.0;
  for (const auto& m : members) {
    if (!(m.degree > 0.0) || !std::isfinite(m.degree)) {
      fail(ErrorCode::ZeroDegree, "member with non-positive degree");
    }
    const double w = 1.0 / m.degree;
    den += w;
    if (m.has_trait) num += w;
  }
  return num / den;
}

IncludedSet included_observations(const StudyDataset& ds, const TraitSelector& trait,
                                  DegreeQuestion degree) {
  ds.trait_index(trait.trait);
  IncludedSet out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& r = ds[i];
    if (r.is_seed()) {
      ++out.seeds;
      continue;
    }
    const auto value = ds.indicator(i, trait);
    const auto d = r.degree.get(degree);
    if (!value) {
      ++out.missing_trait;
    } else if (!d) {
      ++out.missing_degree;
    } else if (*d <= 0) {
      ++out.zero_degree;
    } else {
      out.observations.push_back(Observation{i, *value, *d});
    }
  }
  return out;
}

std::vector<Member> to_members(const std::vector<Observation>& obs) {
  std::vector<Member> out;
  out.reserve(obs.size());
  for (const auto& o : obs) out.push_back(Member{o.has_trait, static_cast<double>(o.degree)});
  return out;
}

double EstimateSeries::final_value() const {
  if (values.empty()) fail(ErrorCode::EmptySample, "series '" + label + "' is empty");
  return values.back();
}

EstimateSeries cumulative_estimates(const StudyDataset& ds, const RecruitmentForest&,
                                    const TraitSelector& trait, DegreeQuestion degree) {
  const auto inc = included_observations(ds, trait, degree);
  EstimateSeries s;
  s.label = trait.label;
  double num = 0.0, den = 0.0;
  for (const auto& o : inc.observations) {
    const double w = 1.0 / o.degree;
    den += w;
    if (o.has_trait) num += w;
    s.orders.push_back(ds[o.respondent].interview_order);
    s.values.push_back(num / den);
    s.has_trait.push_back(o.has_trait);
  }
  return s;
}

std::vector<TreeEstimate> per_tree_estimates(const StudyDataset& ds, const RecruitmentForest& forest,
                                             const TraitSelector& trait, DegreeQuestion degree) {
  std::vector<TreeEstimate> out;
  for (const auto& sub : per_tree_subsets(forest, ds, trait, degree)) {
    if (sub.n_s == 0) continue;
    std::vector<Member> members;
    for (std::size_t i : sub.members) {
      members.push_back(Member{*ds.indicator(i, trait), static_cast<double>(*ds[i].degree.get(degree))});
    }
    out.push_back(TreeEstimate{sub.root, vh_estimate(members), sub.n_s});
  }
  return out;
}

// ---------------------------------------------------------------------------
// successive sampling

namespace {

// Integer class sizes summing to total, each at least its sample count, with
// the free units spread by largest remainder in proportion to how far each
// class's target exceeds its sample count.
std::vector<double> allocate_population(long long total, const std::vector<double>& targets,
                                        const std::vector<int>& sampled) {
  const std::size_t k = targets.size();
  long long n = 0;
  std::vector<double> excess(k);
  double excess_sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    n += sampled[j];
    excess[j] = std::max(0.0, targets[j] - sampled[j]);
    excess_sum += excess[j];
  }
  const long long free_units = total - n;
  std::vector<long long> alloc(k, 0);
  if (free_units > 0) {
    if (excess_sum <= 0.0) {
      excess = targets;
      excess_sum = std::accumulate(targets.begin(), targets.end(), 0.0);
    }
    std::vector<double> remainder(k);
    long long given = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const double share = static_cast<double>(free_units) * excess[j] / excess_sum;
      alloc[j] = static_cast<long long>(std::floor(share));
      remainder[j] = share - static_cast<double>(alloc[j]);
      given += alloc[j];
    }
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t r = 0; given < free_units; r = (r + 1) % k, ++given) ++alloc[idx[r]];
  }
  std::vector<double> out(k);
  for (std::size_t j = 0; j < k; ++j) out[j] = static_cast<double>(sampled[j] + alloc[j]);
  return out;
}

// Mean per-class counts of n draws without replacement, probability
// proportional to degree. Replicate r always uses stream r.
std::vector<double> expected_counts(const std::vector<int>& degrees, const std::vector<double>& pop,
                                    std::size_t n, std::size_t reps, std::uint64_t seed) {
  const std::size_t k = degrees.size();
  std::vector<std::vector<double>> counts(reps, std::vector<double>(k, 0.0));
  parallel_for(reps, [&](std::size_t r) {
    Rng rng = make_rng(seed, r);
    std::vector<double> remaining = pop;
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) total += remaining[j] * degrees[j];
    auto& c = counts[r];
    for (std::size_t draw = 0; draw < n; ++draw) {
      double u = uniform01(rng) * total;
      std::size_t j = 0;
      for (; j + 1 < k; ++j) {
        const double w = remaining[j] * degrees[j];
        if (u < w) break;
        u -= w;
      }
      while (remaining[j] < 1.0) --j;  // numerical guard: the last class may be empty
      remaining[j] -= 1.0;
      total -= degrees[j];
      c[j] += 1.0;
    }
  });
  std::vector<double> mean(k, 0.0);
  for (const auto& c : counts) {
    for (std::size_t j = 0; j < k; ++j) mean[j] += c[j];
  }
  for (double& m : mean) m /= static_cast<double>(reps);
  return mean;
}

}  // namespace

SSWeights ss_weights(const std::vector<int>& degrees, const SSConfig& cfg) {
  if (degrees.empty()) fail(ErrorCode::EmptySample, "no members to estimate from");
  for (int d : degrees) {
    if (d <= 0) fail(ErrorCode::ZeroDegree, "member with non-positive degree");
  }
  if (cfg.replications < 1) fail(ErrorCode::InvalidConfig, "replications must be >= 1");
  if (!std::isfinite(cfg.population_size)) fail(ErrorCode::InvalidConfig, "population size must be finite");
  const auto total = static_cast<long long>(std::llround(cfg.population_size));
  const std::size_t n = degrees.size();
  if (total < static_cast<long long>(n)) {
    fail(ErrorCode::PopulationTooSmall, "population size " + fmt_num(cfg.population_size) +
                                            " is smaller than the sample (" + std::to_string(n) + ")");
  }

  std::map<int, int> tally;
  for (int d : degrees) ++tally[d];
  SSWeights w;
  std::vector<int> sampled;
  for (auto [d, c] : tally) {
    w.degree_classes.push_back(d);
    sampled.push_back(c);
  }
  const std::size_t k = sampled.size();

  // start from inclusion proportional to degree
  w.inclusion.resize(k);
  for (std::size_t j = 0; j < k; ++j) w.inclusion[j] = static_cast<double>(w.degree_classes[j]);

  auto normalized = [&](const std::vector<double>& pi) {
    std::vector<double> out(k);
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += sampled[j] / pi[j];
    for (std::size_t j = 0; j < k; ++j) out[j] = (1.0 / pi[j]) / s;
    return out;
  };

  std::vector<double> prev = normalized(w.inclusion);
  for (std::size_t it = 0; it < std::max<std::size_t>(cfg.max_iterations, 1); ++it) {
    std::vector<double> targets(k);
    double scale = 0.0;
    for (std::size_t j = 0; j < k; ++j) scale += sampled[j] / w.inclusion[j];
    for (std::size_t j = 0; j < k; ++j) {
      targets[j] = static_cast<double>(total) * (sampled[j] / w.inclusion[j]) / scale;
    }
    w.population = allocate_population(total, targets, sampled);
    const auto mean = expected_counts(w.degree_classes, w.population, n, cfg.replications, cfg.rng_seed);
    const double floor_count = 0.5 / static_cast<double>(cfg.replications);
    for (std::size_t j = 0; j < k; ++j) {
      w.inclusion[j] = std::min(1.0, std::max(mean[j], floor_count) / w.population[j]);
    }
    w.iterations = it + 1;
    const auto next = normalized(w.inclusion);
    double change = 0.0;
    for (std::size_t j = 0; j < k; ++j) change = std::max(change, std::fabs(next[j] - prev[j]));
    prev = next;
    if (change < cfg.tolerance) {
      w.converged = true;
      break;
    }
  }
  return w;
}

SSResult ss_estimate(const std::vector<Observation>& obs, const SSConfig& cfg) {
  std::vector<int> degrees;
  degrees.reserve(obs.size());
  for (const auto& o : obs) degrees.push_back(o.degree);
  const SSWeights w = ss_weights(degrees, cfg);
  double num = 0.0, den = 0.0;
  for (const auto& o : obs) {
    const auto j = static_cast<std::size_t>(
        std::lower_bound(w.degree_classes.begin(), w.degree_classes.end(), o.degree) - w.degree_classes.begin());
    const double weight = 1.0 / w.inclusion[j];
    den += weight;
    if (o.has_trait) num += weight;
  }
  SSResult r;
  r.estimate = num / den;
  r.iterations = w.iterations;
  r.converged = w.converged;
  if (!w.converged) {
    r.warning = "NonConvergence: inclusion weights still moving after " + std::to_string(w.iterations) +
                " iterations (N=" + fmt_num(cfg.population_size) + ")";
  }
  return r;
}

SSResult ss_estimate(const StudyDataset& ds, const TraitSelector& trait, const SSConfig& cfg,
                     DegreeQuestion degree) {
  return ss_estimate(included_observations(ds, trait, degree).observations, cfg);
}

SSVHTable ss_vh_table(const StudyDataset& ds, const std::vector<TraitSelector>& traits,
                      const std::vector<SSConfig>& scenarios, double threshold, DegreeQuestion degree) {
  SSVHTable table;
  table.threshold = threshold;
  for (const auto& sel : traits) {
    try {
      const auto obs = included_observations(ds, sel, degree).observations;
      SSVHRow row;
      row.trait = sel.label;
      row.vh = vh_estimate(to_members(obs));
      for (const auto& cfg : scenarios) {
        const auto ss = ss_estimate(obs, cfg);
        SSCell cell{cfg.population_size, ss.estimate, ss.estimate - row.vh, ss.converged};
        row.max_abs_difference = std::max(row.max_abs_difference, std::fabs(cell.difference));
        row.scenarios.push_back(cell);
      }
      row.flagged = row.max_abs_difference > threshold;
      table.rows.push_back(std::move(row));
    } catch (const Error& e) {
      if (e.family() != ErrorFamily::Analysis) throw;
      table.not_evaluable.push_back(sel.label + ": " + e.what());
    }
  }
  return table;
}

std::string ss_vh_csv(const SSVHTable& table) {
  CsvTable t;
  t.header = {"trait", "VH"};
  if (!table.rows.empty()) {
    for (const auto& c : table.rows.front().scenarios) t.header.push_back("N=" + fmt_num(c.population_size));
  }
  t.header.emplace_back("max_abs_difference");
  t.header.emplace_back("flagged");
  for (const auto& r : table.rows) {
    std::vector<std::string> row{r.trait, fmt_num(r.vh)};
    for (const auto& c : r.scenarios) row.push_back(fmt_num(c.ss));
    row.push_back(fmt_num(r.max_abs_difference));
    row.emplace_back(r.flagged ? "yes" : "no");
    t.rows.push_back(std::move(row));
  }
  return to_csv(t);
}

}  // namespace rdsdiag
