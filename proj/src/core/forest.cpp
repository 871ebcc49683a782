#include "rdsdiag/forest.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_map>

#include "rdsdiag/csv.hpp"
#include "rdsdiag/error.hpp"

namespace rdsdiag {

RecruitmentForest::RecruitmentForest(std::vector<std::string> ids, std::vector<int> order,
                                     std::vector<std::optional<std::size_t>> parent)
    : ids_(std::move(ids)), parent_(std::move(parent)) {
  const std::size_t n = parent_.size();
  children_.assign(n, {});
  wave_.assign(n, -1);
  tree_of_.assign(n, 0);

  std::vector<std::size_t> by_order(n);
  std::iota(by_order.begin(), by_order.end(), std::size_t{0});
  std::stable_sort(by_order.begin(), by_order.end(),
                   [&](std::size_t a, std::size_t b) { return order[a] < order[b]; });
  for (std::size_t i : by_order) {
    if (parent_[i]) {
      children_[*parent_[i]].push_back(i);
    } else {
      roots_.push_back(i);
    }
  }

  std::deque<std::size_t> queue;
  for (std::size_t r : roots_) {
    wave_[r] = 0;
    tree_of_[r] = r;
    queue.push_back(r);
  }
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t c : children_[v]) {
      wave_[c] = wave_[v] + 1;
      tree_of_[c] = tree_of_[v];
      queue.push_back(c);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (wave_[i] < 0) fail(ErrorCode::CycleDetected, "respondent " + ids_[i] + " is its own ancestor");
  }

  tree_size_.assign(roots_.size(), 0);
  std::unordered_map<std::size_t, std::size_t> slot;
  for (std::size_t k = 0; k < roots_.size(); ++k) slot[roots_[k]] = k;
  for (std::size_t i = 0; i < n; ++i) {
    if (parent_[i]) ++tree_size_[slot[tree_of_[i]]];
  }
}

RecruitmentForest RecruitmentForest::build(const StudyDataset& ds) {
  std::vector<Respondent> records = ds.respondents();
  return from_records(records);
}

RecruitmentForest RecruitmentForest::from_records(const std::vector<Respondent>& records) {
  const std::size_t n = records.size();
  std::unordered_map<std::string, std::size_t> issuer;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& c : records[i].coupons_out) {
      if (!issuer.emplace(c, i).second) {
        fail(ErrorCode::DuplicateCoupon, "coupon '" + c + "' issued more than once");
      }
    }
  }
  std::vector<std::string> ids;
  std::vector<int> order;
  std::vector<std::optional<std::size_t>> parent(n);
  std::unordered_map<std::string, std::size_t> redeemed;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back(records[i].id);
    order.push_back(records[i].interview_order);
    if (!records[i].coupon_in) continue;
    auto it = issuer.find(*records[i].coupon_in);
    if (it == issuer.end()) {
      fail(ErrorCode::DanglingCoupon, "respondent " + records[i].id + " redeemed coupon '" +
                                          *records[i].coupon_in + "' issued by nobody");
    }
    if (!redeemed.emplace(*records[i].coupon_in, i).second) {
      fail(ErrorCode::DuplicateCoupon, "coupon '" + *records[i].coupon_in + "' redeemed twice");
    }
    parent[i] = it->second;
  }
  return RecruitmentForest(std::move(ids), std::move(order), std::move(parent));
}

std::size_t RecruitmentForest::tree_index(std::size_t root) const {
  auto it = std::find(roots_.begin(), roots_.end(), root);
  if (it == roots_.end()) fail(ErrorCode::Internal, "not a root: " + std::to_string(root));
  return static_cast<std::size_t>(it - roots_.begin());
}

std::size_t RecruitmentForest::tree_size(std::size_t root) const {
  return tree_size_[tree_index(root)];
}

int RecruitmentForest::max_wave() const noexcept {
  return wave_.empty() ? 0 : *std::max_element(wave_.begin(), wave_.end());
}

std::string RecruitmentForest::edge_list_csv() const {
  CsvTable t;
  t.header = {"child_id", "parent_id", "wave", "tree_root"};
  for (std::size_t i = 0; i < size(); ++i) {
    t.rows.push_back({ids_[i], parent_[i] ? ids_[*parent_[i]] : "", std::to_string(wave_[i]),
                      ids_[tree_of_[i]]});
  }
  return to_csv(t);
}

std::vector<TreeSubset> per_tree_subsets(const RecruitmentForest& forest, const StudyDataset& ds,
                                         const TraitSelector& trait, DegreeQuestion degree) {
  ds.trait_index(trait.trait);
  std::vector<TreeSubset> out(forest.roots().size());
  std::unordered_map<std::size_t, std::size_t> slot;
  for (std::size_t k = 0; k < forest.roots().size(); ++k) {
    out[k].root = forest.roots()[k];
    slot[forest.roots()[k]] = k;
  }
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (!forest.parent(i)) continue;
    const auto d = ds[i].degree.get(degree);
    if (!d || *d <= 0 || !ds.indicator(i, trait)) continue;
    auto& sub = out[slot[forest.tree_of(i)]];
    sub.members.push_back(i);
    ++sub.n_s;
  }
  return out;
}

}  // namespace rdsdiag
