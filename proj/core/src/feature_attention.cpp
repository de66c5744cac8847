#include "cabo/feature_attention.hpp"

#include <algorithm>
#include <stdexcept>

namespace cabo {

std::vector<int> top_u_by_score(const std::vector<int>& candidates,
                                const std::vector<double>& scores, int u) {
  if (u < 0) throw std::invalid_argument("top_u_by_score: negative subset size");
  if (static_cast<std::size_t>(u) > candidates.size()) {
    throw std::invalid_argument("top_u_by_score: budget exceeds candidate count");
  }
  if (candidates.size() != scores.size()) {
    throw std::invalid_argument("top_u_by_score: candidates/scores size mismatch");
  }
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return candidates[a] < candidates[b];
  });
  std::vector<int> picked(static_cast<std::size_t>(u));
  for (int i = 0; i < u; ++i) picked[static_cast<std::size_t>(i)] = candidates[order[i]];
  std::sort(picked.begin(), picked.end());
  return picked;
}

CcbFeatureSelector::CcbFeatureSelector(const FeatureGroupSchema& schema, double exploration)
    : exploration_(exploration) {
  if (exploration < 0.0) {
    throw std::invalid_argument("CcbFeatureSelector: exploration must be >= 0");
  }
  estimators_.reserve(static_cast<std::size_t>(schema.num_groups()));
  for (int g = 0; g < schema.num_groups(); ++g) {
    estimators_.emplace_back(schema.num_features());
  }
  if (estimators_.empty()) {
    throw std::invalid_argument("CcbFeatureSelector: schema has no unknown groups");
  }
}

const GaussianLinearEstimator& CcbFeatureSelector::estimator(int g) const {
  if (g < 0 || g >= num_groups()) {
    throw std::invalid_argument("CcbFeatureSelector: unknown group index");
  }
  return estimators_[static_cast<std::size_t>(g)];
}

std::vector<int> CcbFeatureSelector::select(const Eigen::VectorXd& x,
                                            const std::vector<int>& candidates, int u,
                                            std::mt19937_64& rng) {
  std::vector<double> scores(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const int g = candidates[i];
    if (g < 0 || g >= num_groups()) {
      throw std::invalid_argument("CcbFeatureSelector::select: unknown group index");
    }
    const Eigen::VectorXd theta = estimators_[static_cast<std::size_t>(g)].sample(exploration_, rng);
    scores[i] = GaussianLinearEstimator::score(theta, x);
  }
  return top_u_by_score(candidates, scores, u);
}

void CcbFeatureSelector::update(const std::vector<int>& revealed, const Eigen::VectorXd& x,
                                double reward, double decay) {
  for (int g : revealed) {
    if (g < 0 || g >= num_groups()) {
      throw std::invalid_argument("CcbFeatureSelector::update: unknown group index");
    }
  }
  for (int g : revealed) {
    estimators_[static_cast<std::size_t>(g)].update(x, reward, decay);
  }
}

BetaFeatureSelector::BetaFeatureSelector(int num_groups, std::optional<int> window)
    : alpha_(static_cast<std::size_t>(num_groups), 1.0),
      beta_(static_cast<std::size_t>(num_groups), 1.0),
      window_(window) {
  if (num_groups < 1) {
    throw std::invalid_argument("BetaFeatureSelector: need at least one group");
  }
  if (window_ && *window_ < 1) {
    throw std::invalid_argument("BetaFeatureSelector: window must be >= 1");
  }
}

double BetaFeatureSelector::alpha(int g) const {
  check_groups({g});
  return alpha_[static_cast<std::size_t>(g)];
}

double BetaFeatureSelector::beta(int g) const {
  check_groups({g});
  return beta_[static_cast<std::size_t>(g)];
}

std::vector<int> BetaFeatureSelector::select(const std::vector<int>& candidates, int u,
                                             std::mt19937_64& rng) {
  check_groups(candidates);
  std::vector<double> scores(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const std::size_t g = static_cast<std::size_t>(candidates[i]);
    std::gamma_distribution<double> ga(alpha_[g], 1.0);
    std::gamma_distribution<double> gb(beta_[g], 1.0);
    const double a = ga(rng);
    const double b = gb(rng);
    scores[i] = (a + b > 0.0) ? a / (a + b) : 0.5;
  }
  return top_u_by_score(candidates, scores, u);
}

void BetaFeatureSelector::update(const std::vector<int>& revealed, int reward) {
  if (reward != 0 && reward != 1) {
    throw std::invalid_argument("BetaFeatureSelector::update: reward must be 0 or 1");
  }
  check_groups(revealed);
  if (!window_) {
    for (int g : revealed) {
      alpha_[static_cast<std::size_t>(g)] += reward;
      beta_[static_cast<std::size_t>(g)] += 1 - reward;
    }
    return;
  }
  buffer_.push_back(Event{revealed, reward});
  while (buffer_.size() > static_cast<std::size_t>(*window_)) buffer_.pop_front();
  // Recompute from the buffer: windowed state is a pure function of the
  // last `window` events.
  std::fill(alpha_.begin(), alpha_.end(), 1.0);
  std::fill(beta_.begin(), beta_.end(), 1.0);
  for (const Event& ev : buffer_) {
    for (int g : ev.revealed) {
      alpha_[static_cast<std::size_t>(g)] += ev.reward;
      beta_[static_cast<std::size_t>(g)] += 1 - ev.reward;
    }
  }
}

void BetaFeatureSelector::check_groups(const std::vector<int>& groups) const {
  for (int g : groups) {
    if (g < 0 || g >= num_groups()) {
      throw std::invalid_argument("BetaFeatureSelector: unknown group index");
    }
  }
}

}  // namespace cabo
