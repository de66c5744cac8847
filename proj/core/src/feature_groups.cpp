#include "cabo/feature_groups.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cabo {

FeatureGroupSchema::FeatureGroupSchema(int num_features, std::vector<int> observed,
                                       std::vector<std::vector<int>> groups)
    : num_features_(num_features), observed_(std::move(observed)), groups_(std::move(groups)) {
  std::sort(observed_.begin(), observed_.end());
  for (auto& g : groups_) std::sort(g.begin(), g.end());
  names_.resize(groups_.size());
  for (std::size_t g = 0; g < groups_.size(); ++g) names_[g] = "g" + std::to_string(g);
  validate();
}

FeatureGroupSchema FeatureGroupSchema::all_unknown_singletons(int num_features) {
  return with_observed(num_features, {});
}

FeatureGroupSchema FeatureGroupSchema::with_observed(int num_features,
                                                     std::vector<int> observed) {
  std::vector<bool> is_observed(static_cast<std::size_t>(std::max(num_features, 0)), false);
  for (int i : observed) {
    if (i < 0 || i >= num_features) {
      throw std::invalid_argument("FeatureGroupSchema: observed index out of range");
    }
    is_observed[static_cast<std::size_t>(i)] = true;
  }
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < num_features; ++i) {
    if (!is_observed[static_cast<std::size_t>(i)]) groups.push_back({i});
  }
  return FeatureGroupSchema(num_features, std::move(observed), std::move(groups));
}

const std::vector<int>& FeatureGroupSchema::group(int g) const {
  if (g < 0 || g >= num_groups()) {
    throw std::invalid_argument("FeatureGroupSchema: group index out of range");
  }
  return groups_[static_cast<std::size_t>(g)];
}

void FeatureGroupSchema::set_group_names(std::vector<std::string> names) {
  if (names.size() != groups_.size()) {
    throw std::invalid_argument("FeatureGroupSchema: one name per group required");
  }
  names_ = std::move(names);
}

int FeatureGroupSchema::num_unknown_features() const noexcept {
  return std::accumulate(groups_.begin(), groups_.end(), 0,
                         [](int acc, const auto& g) { return acc + static_cast<int>(g.size()); });
}

void FeatureGroupSchema::validate() const {
  if (num_features_ < 1) {
    throw std::invalid_argument("FeatureGroupSchema: need at least one feature");
  }
  // Observed and every group must tile {0..N-1} exactly once.
  std::vector<int> seen(static_cast<std::size_t>(num_features_), 0);
  auto mark = [&](int idx) {
    if (idx < 0 || idx >= num_features_) {
      throw std::invalid_argument("FeatureGroupSchema: feature index out of range");
    }
    if (++seen[static_cast<std::size_t>(idx)] > 1) {
      throw std::invalid_argument("FeatureGroupSchema: feature index assigned twice");
    }
  };
  for (int i : observed_) mark(i);
  for (const auto& g : groups_) {
    if (g.empty()) throw std::invalid_argument("FeatureGroupSchema: empty group");
    for (int i : g) mark(i);
  }
  for (int count : seen) {
    if (count != 1) {
      throw std::invalid_argument("FeatureGroupSchema: schema must cover every feature index");
    }
  }
}

}  // namespace cabo
