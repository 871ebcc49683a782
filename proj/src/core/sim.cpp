#include "rdsdiag/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <tuple>

#include "rdsdiag/behavior.hpp"
#include "rdsdiag/error.hpp"
#include "rdsdiag/rng.hpp"

namespace rdsdiag {

std::size_t SyntheticNetwork::trait_index(const std::string& name) const {
  for (std::size_t t = 0; t < trait_names.size(); ++t) {
    if (trait_names[t] == name) return t;
  }
  fail(ErrorCode::UnknownTrait, "network has no trait '" + name + "'");
}

namespace {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

// Gaps between successes of independent Bernoulli(p) trials.
class GeometricSkipper {
 public:
  GeometricSkipper(double p, Rng& rng) : p_(p), rng_(rng), log_q_(std::log1p(-p)) {}
  // Number of failures before the next success; huge when p == 0.
  std::uint64_t next() {
    if (p_ >= 1.0) return 0;
    if (p_ <= 0.0) return ~std::uint64_t{0} / 2;
    const double u = uniform01(rng_);
    const double skip = std::floor(std::log1p(-u) / log_q_);
    return skip >= 9e18 ? ~std::uint64_t{0} / 2 : static_cast<std::uint64_t>(skip);
  }

 private:
  double p_;
  Rng& rng_;
  double log_q_;
};

void within_block_edges(std::uint32_t first, std::uint64_t size, double p, Rng& rng, std::vector<Edge>& out) {
  if (size < 2 || p <= 0.0) return;
  GeometricSkipper g(p, rng);
  // pairs (v, w) with w < v, enumerated row by row
  std::uint64_t v = 1, w = 0;
  w = g.next();
  while (true) {
    while (v < size && w >= v) {
      w -= v;
      ++v;
    }
    if (v >= size) break;
    out.emplace_back(first + static_cast<std::uint32_t>(v), first + static_cast<std::uint32_t>(w));
    const std::uint64_t s = g.next();
    if (s > (std::uint64_t{1} << 62)) break;
    w += 1 + s;
  }
}

void between_block_edges(std::uint32_t a0, std::uint64_t na, std::uint32_t b0, std::uint64_t nb, double p, Rng& rng,
                         std::vector<Edge>& out) {
  if (na == 0 || nb == 0 || p <= 0.0) return;
  GeometricSkipper g(p, rng);
  const std::uint64_t total = na * nb;
  std::uint64_t idx = g.next();
  while (idx < total) {
    out.emplace_back(a0 + static_cast<std::uint32_t>(idx / nb), b0 + static_cast<std::uint32_t>(idx % nb));
    const std::uint64_t s = g.next();
    if (s >= total) break;
    idx += 1 + s;
  }
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }
  std::size_t size_of(std::size_t x) { return size_[find(x)]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

double per_block(const std::vector<double>& values, std::size_t block, const std::string& what) {
  if (values.empty()) fail(ErrorCode::UnrealizableConfig, what + " needs at least one value");
  if (values.size() == 1) return values[0];
  if (block >= values.size()) fail(ErrorCode::UnrealizableConfig, what + " has fewer values than blocks");
  return values[block];
}

}  // namespace

SyntheticNetwork generate_network(const NetworkConfig& cfg, std::uint64_t rng_seed) {
  if (cfg.block_sizes.empty()) fail(ErrorCode::UnrealizableConfig, "network needs at least one block");
  if (!is_probability(cfg.within) || !is_probability(cfg.between)) {
    fail(ErrorCode::UnrealizableConfig, "edge probabilities must be in [0,1]");
  }
  const std::size_t n = std::accumulate(cfg.block_sizes.begin(), cfg.block_sizes.end(), std::size_t{0});
  if (n < 2) fail(ErrorCode::UnrealizableConfig, "network needs at least two nodes");
  if (n > 0xffffffffULL) fail(ErrorCode::UnrealizableConfig, "network too large");
  double expected = 0.0;
  for (std::size_t s : cfg.block_sizes) {
    expected += static_cast<double>(s) * ((static_cast<double>(s) - 1.0) * cfg.within +
                                          static_cast<double>(n - s) * cfg.between);
  }
  expected /= static_cast<double>(n);
  if (expected < 1.0) {
    fail(ErrorCode::UnrealizableConfig, "expected degree " + std::to_string(expected) + " is below 1");
  }

  SyntheticNetwork net;
  net.node_count = n;
  std::vector<std::uint32_t> first;
  for (std::size_t b = 0, o = 0; b < cfg.block_sizes.size(); o += cfg.block_sizes[b], ++b) {
    first.push_back(static_cast<std::uint32_t>(o));
    net.block.insert(net.block.end(), cfg.block_sizes[b], b);
  }

  std::vector<Edge> edges;
  {
    Rng rng = make_rng(rng_seed, 0);
    for (std::size_t b = 0; b < cfg.block_sizes.size(); ++b) {
      within_block_edges(first[b], cfg.block_sizes[b], cfg.within, rng, edges);
      for (std::size_t c = b + 1; c < cfg.block_sizes.size(); ++c) {
        between_block_edges(first[b], cfg.block_sizes[b], first[c], cfg.block_sizes[c], cfg.between, rng, edges);
      }
    }
  }

  if (cfg.connect) {
    DisjointSets sets(n);
    for (auto [a, b] : edges) sets.unite(a, b);
    std::size_t giant = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (sets.size_of(v) > sets.size_of(giant)) giant = v;
    }
    Rng rng = make_rng(rng_seed, 1);
    std::vector<std::size_t> giant_nodes;
    for (std::size_t v = 0; v < n; ++v) {
      if (sets.find(v) == sets.find(giant)) giant_nodes.push_back(v);
    }
    // one edge from the lowest-index node of each other component
    std::vector<char> seen(n, 0);
    const std::size_t giant_root = sets.find(giant);
    for (std::size_t v = 0; v < n; ++v) {
      const std::size_t r = sets.find(v);
      if (r == giant_root || seen[r]) continue;
      seen[r] = 1;
      const std::size_t target = giant_nodes[uniform_below(rng, giant_nodes.size())];
      edges.emplace_back(static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(target));
      ++net.components_joined;
    }
  }

  net.offsets.assign(n + 1, 0);
  for (auto [a, b] : edges) {
    ++net.offsets[a + 1];
    ++net.offsets[b + 1];
  }
  for (std::size_t v = 0; v < n; ++v) net.offsets[v + 1] += net.offsets[v];
  net.adjacency.resize(net.offsets[n]);
  {
    std::vector<std::size_t> fill(net.offsets.begin(), net.offsets.end() - 1);
    for (auto [a, b] : edges) {
      net.adjacency[fill[a]++] = b;
      net.adjacency[fill[b]++] = a;
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(net.adjacency.begin() + static_cast<std::ptrdiff_t>(net.offsets[v]),
              net.adjacency.begin() + static_cast<std::ptrdiff_t>(net.offsets[v + 1]));
  }

  for (std::size_t t = 0; t < cfg.traits.size(); ++t) {
    const auto& rule = cfg.traits[t];
    if (rule.name.empty()) fail(ErrorCode::UnrealizableConfig, "trait rule without a name");
    if (std::find(net.trait_names.begin(), net.trait_names.end(), rule.name) != net.trait_names.end()) {
      fail(ErrorCode::UnrealizableConfig, "trait '" + rule.name + "' defined twice");
    }
    std::vector<char> values(n, 0);
    Rng rng = make_rng(rng_seed, 2 + t);
    switch (rule.kind) {
      case TraitRuleKind::Blocks:
        for (std::size_t v = 0; v < n; ++v) {
          values[v] = std::find(rule.blocks.begin(), rule.blocks.end(), net.block[v]) != rule.blocks.end();
        }
        break;
      case TraitRuleKind::Bernoulli:
        for (double p : rule.probabilities) {
          if (!is_probability(p)) fail(ErrorCode::UnrealizableConfig, "trait probability outside [0,1]");
        }
        for (std::size_t v = 0; v < n; ++v) {
          values[v] = uniform01(rng) < per_block(rule.probabilities, net.block[v], "trait '" + rule.name + "'");
        }
        break;
      case TraitRuleKind::TopDegree: {
        if (rule.count > n) fail(ErrorCode::UnrealizableConfig, "top_degree count exceeds node count");
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return net.degree(a) > net.degree(b); });
        for (std::size_t k = 0; k < rule.count; ++k) values[order[k]] = 1;
        break;
      }
    }
    net.trait_names.push_back(rule.name);
    net.trait_values.push_back(std::move(values));
  }

  {
    for (double p : cfg.employment_probability) {
      if (!is_probability(p)) fail(ErrorCode::UnrealizableConfig, "employment probability outside [0,1]");
    }
    Rng rng = make_rng(rng_seed, 1000);
    net.employed.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      net.employed[v] = uniform01(rng) < per_block(cfg.employment_probability, net.block[v], "network.employment");
    }
  }
  return net;
}

double true_prevalence(const SyntheticNetwork& net, const std::string& trait) {
  const auto& v = net.trait_values[net.trait_index(trait)];
  return static_cast<double>(std::count(v.begin(), v.end(), 1)) / static_cast<double>(net.node_count);
}

double block_modularity(const SyntheticNetwork& net) {
  const std::size_t blocks = net.block.empty() ? 0 : *std::max_element(net.block.begin(), net.block.end()) + 1;
  std::vector<double> inside(blocks, 0.0), total(blocks, 0.0);
  for (std::size_t v = 0; v < net.node_count; ++v) {
    total[net.block[v]] += static_cast<double>(net.degree(v));
    for (auto u : net.neighbors(v)) {
      if (net.block[u] == net.block[v]) inside[net.block[v]] += 1.0;  // counted from both ends
    }
  }
  const double two_m = static_cast<double>(net.adjacency.size());
  if (two_m == 0.0) return 0.0;
  double q = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) q += inside[b] / two_m - (total[b] / two_m) * (total[b] / two_m);
  return q;
}

std::size_t connected_components(const SyntheticNetwork& net) {
  DisjointSets sets(net.node_count);
  for (std::size_t v = 0; v < net.node_count; ++v) {
    for (auto u : net.neighbors(v)) sets.unite(v, u);
  }
  std::size_t count = 0;
  for (std::size_t v = 0; v < net.node_count; ++v) count += sets.find(v) == v;
  return count;
}

// ---------------------------------------------------------------------------
// RDS process

namespace {

std::size_t pick(const std::vector<double>& weights, Rng& rng) {
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = uniform01(rng) * total;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return weights.size() - 1;
}

int binomial(int trials, double p, Rng& rng) {
  int k = 0;
  for (int i = 0; i < trials; ++i) k += uniform01(rng) < p;
  return k;
}

int geometric(double p, Rng& rng) {  // failures before success
  int k = 0;
  while (uniform01(rng) >= p && k < 60) ++k;
  return k;
}

double normal(Rng& rng) {
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

int noisy(int value, double sd, Rng& rng) {
  return std::max(0, static_cast<int>(std::lround(value + sd * normal(rng))));
}

void check_mixture(const std::vector<double>& w, const std::string& what) {
  double s = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) fail(ErrorCode::UnrealizableConfig, what + " has a negative weight");
    s += x;
  }
  if (!(s > 0.0)) fail(ErrorCode::UnrealizableConfig, what + " has no positive weight");
}

struct Event {
  int day = 0;
  std::uint64_t seq = 0;
  std::uint32_t node = 0;
  std::optional<std::size_t> recruiter;  // respondent index
  std::string coupon;

  bool operator>(const Event& o) const { return std::tie(day, seq) > std::tie(o.day, o.seq); }
};

std::vector<std::size_t> choose_seeds(const SyntheticNetwork& net, const SimConfig& cfg, Rng& rng) {
  std::vector<std::size_t> pool;
  if (cfg.seed_rule == SeedRule::FromBlock) {
    for (std::size_t v = 0; v < net.node_count; ++v) {
      if (net.block[v] == cfg.seed_block) pool.push_back(v);
    }
  } else {
    pool.resize(net.node_count);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
  }
  if (pool.size() < cfg.seed_count) fail(ErrorCode::UnrealizableConfig, "not enough nodes to draw the seeds from");
  std::vector<std::size_t> seeds;
  if (cfg.seed_rule == SeedRule::DegreeProportional) {
    std::vector<double> w(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) w[i] = static_cast<double>(net.degree(pool[i]));
    for (std::size_t k = 0; k < cfg.seed_count; ++k) {
      const std::size_t i = pick(w, rng);
      seeds.push_back(pool[i]);
      w[i] = 0.0;
    }
  } else {
    for (std::size_t k = 0; k < cfg.seed_count; ++k) {
      const std::size_t j = k + uniform_below(rng, pool.size() - k);
      std::swap(pool[k], pool[j]);
      seeds.push_back(pool[k]);
    }
  }
  return seeds;
}

}  // namespace

SimResult simulate_rds(const SyntheticNetwork& net, const SimConfig& cfg) {
  if (cfg.seed_count < 1 || cfg.seed_count > net.node_count) {
    fail(ErrorCode::UnrealizableConfig, "seed_count must be in 1..N");
  }
  if (cfg.coupon_allotment < 0) fail(ErrorCode::UnrealizableConfig, "coupon allotment must be >= 0");
  if (cfg.approach_limit < 0) fail(ErrorCode::UnrealizableConfig, "approach limit must be >= 0");
  if (cfg.target_n < cfg.seed_count) fail(ErrorCode::UnrealizableConfig, "target_n is smaller than seed_count");
  if (cfg.mode == ReplacementMode::Without && cfg.target_n > net.node_count) {
    fail(ErrorCode::UnrealizableConfig, "target_n exceeds N in without-replacement mode");
  }
  for (double p : {cfg.refusal_prob, cfg.non_return_prob, cfg.followup_prob, cfg.reciprocation_prob}) {
    if (!is_probability(p)) fail(ErrorCode::UnrealizableConfig, "probabilities must be in [0,1]");
  }
  if (cfg.positive_return_multiplier < 0.0 || cfg.employment_bias < -1.0 || cfg.retest_noise_sd < 0.0) {
    fail(ErrorCode::UnrealizableConfig, "negative multiplier, bias below -1 or negative noise");
  }
  const std::size_t levels = static_cast<std::size_t>(cfg.coupon_allotment) + 1;
  for (const auto* rate : {&cfg.recruit_rate, &cfg.recruit_rate_positive}) {
    if (rate->empty()) continue;
    if (rate->size() != levels) fail(ErrorCode::UnrealizableConfig, "recruit_rate needs allotment+1 weights");
    check_mixture(*rate, "recruit_rate");
  }
  check_mixture(cfg.motivation_mixture, "motivation_mixture");
  check_mixture(cfg.refusal_reason_mixture, "refusal_reason_mixture");
  const auto& motivations = motivation_categories();
  const auto& reasons = refusal_categories();
  if (cfg.motivation_mixture.size() != motivations.size() || cfg.refusal_reason_mixture.size() != reasons.size()) {
    fail(ErrorCode::UnrealizableConfig, "mixture length does not match the category list");
  }
  std::optional<std::size_t> rate_trait, return_trait;
  if (!cfg.recruit_rate_trait.empty() && !cfg.recruit_rate_positive.empty()) {
    rate_trait = net.trait_index(cfg.recruit_rate_trait);
  }
  if (!cfg.return_trait.empty()) return_trait = net.trait_index(cfg.return_trait);

  Rng rng = make_rng(cfg.rng_seed, 0);
  const bool without = cfg.mode == ReplacementMode::Without;
  // 0 untouched, 1 holding a coupon, 2 interviewed
  std::vector<char> status(net.node_count, 0);
  std::vector<std::uint32_t> visits(net.node_count, 0);
  const Date start = Date{std::chrono::year{2008} / 3 / 1};

  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue;
  std::uint64_t seq = 0;
  for (std::size_t s : choose_seeds(net, cfg, rng)) {
    queue.push(Event{0, seq++, static_cast<std::uint32_t>(s), std::nullopt, ""});
    if (without) status[s] = 1;
  }

  std::vector<std::size_t> node_of;
  std::vector<Respondent> rs;
  std::vector<TraitSpec> specs;
  for (const auto& name : net.trait_names) specs.push_back(TraitSpec{name, TraitKind::Binary, "yes"});

  while (!queue.empty() && rs.size() < cfg.target_n) {
    const Event ev = queue.top();
    queue.pop();
    const std::size_t v = ev.node;
    const std::size_t k = rs.size();
    Respondent r;
    r.id = "R" + std::to_string(k + 1);
    r.interview_order = static_cast<int>(k + 1);
    r.interview_date = start + std::chrono::days{ev.day};
    if (!ev.coupon.empty()) r.coupon_in = ev.coupon;

    const int d = static_cast<int>(net.degree(v));
    r.degree.age = d;
    r.degree.seen_week = d;
    r.degree.province = d + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(1 + d / 2)));
    r.degree.know = *r.degree.province + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(1 + d / 2)));
    r.degree.reach_week = binomial(d, 0.9, rng);
    r.degree.reach_day = binomial(*r.degree.reach_week, 0.65, rng);
    r.degree.receive_week = binomial(d, 0.85, rng);
    r.employed = net.employed[v] != 0;
    r.motivation = motivations[pick(cfg.motivation_mixture, rng)];
    for (std::size_t t = 0; t < net.trait_names.size(); ++t) {
      r.traits.emplace_back(net.trait_values[t][v] ? "yes" : "no");
    }

    const std::optional<std::size_t> recruiter_node =
        ev.recruiter ? std::optional<std::size_t>(node_of[*ev.recruiter]) : std::nullopt;
    int known = 0;
    for (auto u : net.neighbors(v)) {
      if (recruiter_node && u == *recruiter_node) continue;
      known += without ? status[u] == 2 : visits[u] > 0;
    }
    status[v] = 2;
    ++visits[v];
    node_of.push_back(v);

    // coupon passing
    for (int j = 1; j <= cfg.coupon_allotment; ++j) r.coupons_out.push_back("C" + std::to_string(k + 1) + "_" + std::to_string(j));
    const bool positive_rate = rate_trait && net.trait_values[*rate_trait][v];
    const auto& rate = positive_rate ? cfg.recruit_rate_positive : cfg.recruit_rate;
    const int attempts_wanted = rate.empty() ? cfg.coupon_allotment : static_cast<int>(pick(rate, rng));

    // nobody offers a coupon back to their own recruiter
    std::vector<std::pair<double, std::uint32_t>> order;
    for (auto u : net.neighbors(v)) {
      if (recruiter_node && u == *recruiter_node) continue;
      const double w = 1.0 + (net.employed[u] ? cfg.employment_bias : 0.0);
      const double key = w > 0.0 ? std::pow(uniform01(rng), 1.0 / w) : 0.0;
      order.emplace_back(key, u);
    }
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      return a.first > b.first || (a.first == b.first && a.second < b.second);
    });
    FollowUpRecord fu;
    int failed = 0, refusals = 0, distributed = 0;
    int approached = 0;
    for (const auto& [key, u] : order) {
      if (distributed >= attempts_wanted) break;
      if (cfg.approach_limit > 0 && approached >= cfg.approach_limit) break;
      ++approached;
      if (without && status[u] != 0) {
        ++failed;
        continue;
      }
      if (uniform01(rng) < cfg.refusal_prob) {
        ++refusals;
        const std::string reason = reasons[pick(cfg.refusal_reason_mixture, rng)];
        if (fu.refusal_reasons.size() < kMaxRefusalReasons) fu.refusal_reasons.push_back(reason);
        continue;
      }
      const std::string coupon = r.coupons_out[static_cast<std::size_t>(distributed)];
      ++distributed;
      CouponOutcome co;
      co.coupon_id = coupon;
      co.days_to_distribute = geometric(0.6, rng);
      co.reciprocation_answer = uniform01(rng) < cfg.reciprocation_prob;
      co.recipient_employed = net.employed[u] != 0;
      double p_return = 1.0 - cfg.non_return_prob;
      if (return_trait && net.trait_values[*return_trait][u]) {
        p_return = std::min(1.0, p_return * cfg.positive_return_multiplier);
      }
      if (uniform01(rng) < p_return) {
        if (without) status[u] = 1;
        const int delay = *co.days_to_distribute + 1 + geometric(0.35, rng);
        queue.push(Event{ev.day + delay, seq++, u, k, coupon});
      }
      fu.coupons.push_back(std::move(co));
    }

    if (uniform01(rng) < cfg.followup_prob) {
      fu.n_failed_attempts = failed;
      fu.n_known_participants = known;
      fu.n_coupons_distributed = distributed;
      fu.n_refusals = refusals;
      int employed_contacts = 0;
      for (auto u : net.neighbors(v)) employed_contacts += net.employed[u] != 0;
      fu.n_contacts_employed = employed_contacts;
      auto& t = fu.degree_retest;
      t.age = noisy(d, cfg.retest_noise_sd, rng);
      t.seen_week = std::min(*t.age, noisy(d, cfg.retest_noise_sd, rng));
      t.province = std::max(*t.age, noisy(*r.degree.province, cfg.retest_noise_sd, rng));
      t.know = std::max(*t.province, noisy(*r.degree.know, cfg.retest_noise_sd, rng));
      r.followup = std::move(fu);
    }
    rs.push_back(std::move(r));
  }
  const bool extinct = rs.size() < cfg.target_n;
  std::map<std::string, double> prevalence;
  for (const auto& name : net.trait_names) prevalence[name] = true_prevalence(net, name);
  return SimResult{StudyDataset(cfg.site_label, static_cast<int>(cfg.target_n), std::move(specs), std::move(rs),
                                std::max(1, cfg.coupon_allotment)),
                   std::move(node_of), extinct, std::move(prevalence)};
}

// ---------------------------------------------------------------------------
// scenario files

namespace {

std::vector<std::size_t> to_sizes(const std::vector<double>& v, const std::string& key) {
  std::vector<std::size_t> out;
  for (double x : v) {
    if (!(x >= 0) || x != std::floor(x)) fail(ErrorCode::InvalidConfig, key + " expects nonnegative integers");
    out.push_back(static_cast<std::size_t>(x));
  }
  return out;
}

}  // namespace

Scenario scenario_from_config(const KvConfig& cfg) {
  static const std::vector<std::string> known{
      "network.blocks", "network.within", "network.between", "network.connect", "network.employment",
      "network.seed", "sim.seed_count", "sim.allotment", "sim.mode", "sim.seed_rule", "sim.seed_block",
      "sim.approach_limit", "sim.recruit_rate", "sim.recruit_rate_trait", "sim.recruit_rate_positive", "sim.refusal_prob",
      "sim.non_return_prob", "sim.return_trait", "sim.positive_return_multiplier", "sim.employment_bias",
      "sim.followup_prob", "sim.reciprocation_prob", "sim.retest_noise_sd", "sim.target_n", "sim.seed",
      "sim.motivation_mixture", "sim.refusal_reason_mixture", "sim.site"};
  for (const auto& [key, value] : cfg.entries()) {
    const bool scoped = key.rfind("network.", 0) == 0 || key.rfind("sim.", 0) == 0;
    if (scoped && std::find(known.begin(), known.end(), key) == known.end()) {
      fail(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
    }
  }

  Scenario s;
  auto& n = s.network;
  if (cfg.has("network.blocks")) n.block_sizes = to_sizes(cfg.numbers("network.blocks"), "network.blocks");
  n.within = cfg.number_or("network.within", n.within);
  n.between = cfg.number_or("network.between", n.between);
  n.connect = cfg.flag_or("network.connect", n.connect);
  if (cfg.has("network.employment")) n.employment_probability = cfg.numbers("network.employment");
  s.network_seed = cfg.seed_or("network.seed", s.network_seed);

  for (const auto& [name, rule_text] : cfg.with_prefix("trait.")) {
    TraitRule rule;
    rule.name = name;
    const auto colon = rule_text.find(':');
    const std::string kind = trim(rule_text.substr(0, colon));
    const std::string args = colon == std::string::npos ? "" : rule_text.substr(colon + 1);
    std::vector<double> values;
    for (const auto& item : split_list(args)) {
      char* end = nullptr;
      values.push_back(std::strtod(item.c_str(), &end));
      if (end != item.c_str() + item.size()) fail(ErrorCode::InvalidConfig, "trait." + name + " has a bad number");
    }
    if (kind == "blocks") {
      rule.kind = TraitRuleKind::Blocks;
      rule.blocks = to_sizes(values, "trait." + name);
    } else if (kind == "bernoulli") {
      rule.kind = TraitRuleKind::Bernoulli;
      rule.probabilities = values;
    } else if (kind == "top_degree") {
      rule.kind = TraitRuleKind::TopDegree;
      if (values.size() != 1) fail(ErrorCode::InvalidConfig, "trait." + name + " top_degree takes one count");
      rule.count = to_sizes(values, "trait." + name).front();
    } else {
      fail(ErrorCode::InvalidConfig, "trait." + name + ": unknown rule '" + kind + "'");
    }
    n.traits.push_back(std::move(rule));
  }

  auto& m = s.sim;
  m.seed_count = static_cast<std::size_t>(cfg.integer_or("sim.seed_count", static_cast<long long>(m.seed_count)));
  m.coupon_allotment = static_cast<int>(cfg.integer_or("sim.allotment", m.coupon_allotment));
  const std::string mode = cfg.text_or("sim.mode", "without");
  if (mode == "with") {
    m.mode = ReplacementMode::With;
  } else if (mode == "without") {
    m.mode = ReplacementMode::Without;
  } else {
    fail(ErrorCode::InvalidConfig, "sim.mode must be with or without");
  }
  const std::string rule = cfg.text_or("sim.seed_rule", "uniform");
  if (rule == "uniform") {
    m.seed_rule = SeedRule::Uniform;
  } else if (rule == "degree") {
    m.seed_rule = SeedRule::DegreeProportional;
  } else if (rule == "block") {
    m.seed_rule = SeedRule::FromBlock;
  } else {
    fail(ErrorCode::InvalidConfig, "sim.seed_rule must be uniform, degree or block");
  }
  m.seed_block = static_cast<std::size_t>(cfg.integer_or("sim.seed_block", 0));
  m.approach_limit = static_cast<int>(cfg.integer_or("sim.approach_limit", m.approach_limit));
  if (cfg.has("sim.recruit_rate")) m.recruit_rate = cfg.numbers("sim.recruit_rate");
  m.recruit_rate_trait = cfg.text_or("sim.recruit_rate_trait", "");
  if (cfg.has("sim.recruit_rate_positive")) m.recruit_rate_positive = cfg.numbers("sim.recruit_rate_positive");
  m.refusal_prob = cfg.number_or("sim.refusal_prob", m.refusal_prob);
  m.non_return_prob = cfg.number_or("sim.non_return_prob", m.non_return_prob);
  m.return_trait = cfg.text_or("sim.return_trait", "");
  m.positive_return_multiplier = cfg.number_or("sim.positive_return_multiplier", m.positive_return_multiplier);
  m.employment_bias = cfg.number_or("sim.employment_bias", m.employment_bias);
  m.followup_prob = cfg.number_or("sim.followup_prob", m.followup_prob);
  m.reciprocation_prob = cfg.number_or("sim.reciprocation_prob", m.reciprocation_prob);
  m.retest_noise_sd = cfg.number_or("sim.retest_noise_sd", m.retest_noise_sd);
  m.target_n = static_cast<std::size_t>(cfg.integer_or("sim.target_n", static_cast<long long>(m.target_n)));
  m.rng_seed = cfg.seed_or("sim.seed", m.rng_seed);
  if (cfg.has("sim.motivation_mixture")) m.motivation_mixture = cfg.numbers("sim.motivation_mixture");
  if (cfg.has("sim.refusal_reason_mixture")) m.refusal_reason_mixture = cfg.numbers("sim.refusal_reason_mixture");
  m.site_label = cfg.text_or("sim.site", m.site_label);
  return s;
}

}  // namespace rdsdiag
