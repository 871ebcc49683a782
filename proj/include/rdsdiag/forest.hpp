#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rdsdiag/dataset.hpp"

namespace rdsdiag {

// Seed-rooted recruitment trees. Nodes are respondent indices into the
// dataset the forest was built from.
class RecruitmentForest {
 public:
  static RecruitmentForest build(const StudyDataset& ds);

  // For records that have not been through StudyDataset construction.
  // Throws DanglingCoupon / CycleDetected / DuplicateCoupon.
  static RecruitmentForest from_records(const std::vector<Respondent>& records);

  std::size_t size() const noexcept { return parent_.size(); }
  const std::vector<std::size_t>& roots() const noexcept { return roots_; }
  std::optional<std::size_t> parent(std::size_t i) const { return parent_.at(i); }
  const std::vector<std::size_t>& children(std::size_t i) const { return children_.at(i); }
  int wave(std::size_t i) const { return wave_.at(i); }
  std::size_t tree_of(std::size_t i) const { return tree_of_.at(i); }
  // Non-seed descendants of a root.
  std::size_t tree_size(std::size_t root) const;
  // Position of a root in roots(), i.e. the tree ordinal.
  std::size_t tree_index(std::size_t root) const;
  int max_wave() const noexcept;
  const std::string& id(std::size_t i) const { return ids_.at(i); }

  // child_id,parent_id,wave,tree_root; seeds have an empty parent.
  std::string edge_list_csv() const;

 private:
  RecruitmentForest(std::vector<std::string> ids, std::vector<int> order,
                    std::vector<std::optional<std::size_t>> parent);

  std::vector<std::string> ids_;
  std::vector<std::optional<std::size_t>> parent_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<int> wave_;
  std::vector<std::size_t> tree_of_;
  std::vector<std::size_t> roots_;
  std::vector<std::size_t> tree_size_;  // indexed like roots_
};

struct TreeSubset {
  std::size_t root = 0;
  std::vector<std::size_t> members;  // non-seed, trait and degree usable
  std::size_t n_s = 0;
};

// One entry per tree, in root order; trees may have n_s == 0.
std::vector<TreeSubset> per_tree_subsets(const RecruitmentForest& forest, const StudyDataset& ds,
                                         const TraitSelector& trait,
                                         DegreeQuestion degree = DegreeQuestion::SeenWeek);

}  // namespace rdsdiag
