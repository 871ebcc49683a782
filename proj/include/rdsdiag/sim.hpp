#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rdsdiag/dataset.hpp"
#include "rdsdiag/kvconfig.hpp"

namespace rdsdiag {

enum class TraitRuleKind {
  Blocks,      // positive iff the node's block is listed
  Bernoulli,   // per-block probabilities (one value applies to all blocks)
  TopDegree,   // the count highest-degree nodes, ties by node index
};

struct TraitRule {
  std::string name;
  TraitRuleKind kind = TraitRuleKind::Bernoulli;
  std::vector<std::size_t> blocks;
  std::vector<double> probabilities;
  std::size_t count = 0;
};

struct NetworkConfig {
  std::vector<std::size_t> block_sizes{300};
  double within = 0.05;
  double between = 0.001;
  bool connect = true;
  std::vector<TraitRule> traits;
  std::vector<double> employment_probability{0.5};  // per block, one value applies to all
};

struct SyntheticNetwork {
  std::size_t node_count = 0;
  std::vector<std::size_t> block;          // per node
  std::vector<std::size_t> offsets;        // CSR, size node_count + 1
  std::vector<std::uint32_t> adjacency;    // sorted within each node
  std::vector<std::string> trait_names;
  std::vector<std::vector<char>> trait_values;  // [trait][node]
  std::vector<char> employed;
  std::size_t components_joined = 0;       // edges added to connect the graph

  std::size_t degree(std::size_t v) const { return offsets[v + 1] - offsets[v]; }
  std::span<const std::uint32_t> neighbors(std::size_t v) const {
    return {adjacency.data() + offsets[v], degree(v)};
  }
  std::size_t edge_count() const noexcept { return adjacency.size() / 2; }
  std::size_t trait_index(const std::string& name) const;  // UnknownTrait
};

// Block model with independent edges; UnrealizableConfig for bad
// probabilities or an expected degree below 1.
SyntheticNetwork generate_network(const NetworkConfig& cfg, std::uint64_t rng_seed);

double true_prevalence(const SyntheticNetwork& net, const std::string& trait);

// Newman modularity of the block partition.
double block_modularity(const SyntheticNetwork& net);

std::size_t connected_components(const SyntheticNetwork& net);

enum class ReplacementMode { With, Without };
enum class SeedRule { Uniform, DegreeProportional, FromBlock };

struct SimConfig {
  std::size_t seed_count = 6;
  int coupon_allotment = 3;
  ReplacementMode mode = ReplacementMode::Without;
  SeedRule seed_rule = SeedRule::Uniform;
  std::size_t seed_block = 0;
  // Probability that a respondent tries to hand out 0..allotment coupons.
  // Empty means always the full allotment.
  std::vector<double> recruit_rate;
  // Contacts a respondent approaches before giving up on the remaining
  // coupons; 0 means no limit.
  int approach_limit = 3;
  // Optional override for trait-positive respondents (differential recruitment).
  std::string recruit_rate_trait;
  std::vector<double> recruit_rate_positive;
  double refusal_prob = 0.2;
  double non_return_prob = 0.35;
  double positive_return_multiplier = 1.0;  // scales the return probability of trait-positive recipients
  std::string return_trait;
  double employment_bias = 0.0;  // > 0 favors employed contacts when passing coupons
  double followup_prob = 0.43;
  double reciprocation_prob = 0.87;
  double retest_noise_sd = 2.0;
  std::size_t target_n = 200;
  std::uint64_t rng_seed = 1;
  std::vector<double> motivation_mixture{0.05, 0.75, 0.03, 0.06, 0.08, 0.03};
  std::vector<double> refusal_reason_mixture{0.08, 0.3, 0.02, 0.24, 0.16, 0.05, 0.02, 0.02, 0.11};
  std::string site_label = "sim";
};

struct SimResult {
  StudyDataset dataset;
  std::vector<std::size_t> node_of;  // respondent index -> network node
  bool extinct = false;              // chains died before target_n
  std::map<std::string, double> true_prevalence;
};

SimResult simulate_rds(const SyntheticNetwork& net, const SimConfig& cfg);

struct Scenario {
  NetworkConfig network;
  SimConfig sim;
  std::uint64_t network_seed = 1;
};

// Keys: network.blocks, network.within, network.between, network.connect,
// network.employment, network.seed, trait.<name> = blocks:0,1 | bernoulli:p[,p..]
// | top_degree:k, and sim.* for SimConfig fields.
Scenario scenario_from_config(const KvConfig& cfg);

}  // namespace rdsdiag
