#pragma once

#include <string>
#include <vector>

namespace cabo {

// Partition of the feature indices {0..N-1} into the freely observed set
// and an ordered list of disjoint unknown groups, the unit of budgeted
// reveal. Public tabular datasets use singleton groups (individual-feature
// reveal); grouped schemas model skill feature sets revealed as a block.
class FeatureGroupSchema {
 public:
  FeatureGroupSchema() = default;
  FeatureGroupSchema(int num_features, std::vector<int> observed,
                     std::vector<std::vector<int>> groups);

  /// No observed features, every feature its own group (the restricted-
  /// context setting and the default right after loading a CSV).
  static FeatureGroupSchema all_unknown_singletons(int num_features);

  /// Given observed indices, every remaining feature its own group.
  static FeatureGroupSchema with_observed(int num_features, std::vector<int> observed);

  int num_features() const noexcept { return num_features_; }
  const std::vector<int>& observed() const noexcept { return observed_; }
  const std::vector<std::vector<int>>& groups() const noexcept { return groups_; }
  int num_groups() const noexcept { return static_cast<int>(groups_.size()); }
  const std::vector<int>& group(int g) const;
  const std::vector<std::string>& group_names() const noexcept { return names_; }
  void set_group_names(std::vector<std::string> names);

  int num_unknown_features() const noexcept;

 private:
  int num_features_ = 0;
  std::vector<int> observed_;             // sorted
  std::vector<std::vector<int>> groups_;  // each sorted, pairwise disjoint
  std::vector<std::string> names_;        // one per group

  void validate() const;
};

}  // namespace cabo
