#pragma once

#include <Eigen/Dense>
#include <deque>
#include <optional>
#include <random>
#include <vector>

#include "cabo/bayes_linear.hpp"
#include "cabo/feature_groups.hpp"

namespace cabo {

/// Top-u candidates by score, ties broken toward the lower group index.
/// `candidates` and `scores` are parallel arrays; the result is sorted
/// ascending. Because reveal objectives here are additive over groups,
/// top-u by individual score equals the argmax over all size-u subsets.
std::vector<int> top_u_by_score(const std::vector<int>& candidates,
                                const std::vector<double>& scores, int u);

// Contextual-combinatorial reveal scoring: one linear estimator per unknown
// group, scored against whatever part of the context is visible so far.
class CcbFeatureSelector {
 public:
  CcbFeatureSelector(const FeatureGroupSchema& schema, double exploration);

  int num_groups() const noexcept { return static_cast<int>(estimators_.size()); }
  double exploration() const noexcept { return exploration_; }
  const GaussianLinearEstimator& estimator(int g) const;

  /// Sample a coefficient vector per candidate group, score it against x,
  /// return the u best groups (ascending).
  std::vector<int> select(const Eigen::VectorXd& x, const std::vector<int>& candidates, int u,
                          std::mt19937_64& rng);

  /// Rank-1 decayed update of exactly the revealed groups' estimators.
  void update(const std::vector<int>& revealed, const Eigen::VectorXd& x, double reward,
              double decay);

 private:
  std::vector<GaussianLinearEstimator> estimators_;
  double exploration_;
};

// Beta-Bernoulli reveal scoring with no use of the observed context.
// Unwindowed this is the restricted-context baseline selector; with a
// window it scores from the most recent `window` events only.
class BetaFeatureSelector {
 public:
  explicit BetaFeatureSelector(int num_groups, std::optional<int> window = std::nullopt);

  int num_groups() const noexcept { return static_cast<int>(alpha_.size()); }
  std::optional<int> window() const noexcept { return window_; }
  double alpha(int g) const;
  double beta(int g) const;

  /// One Beta(alpha_g, beta_g) draw per candidate, top-u (ascending).
  std::vector<int> select(const std::vector<int>& candidates, int u, std::mt19937_64& rng);

  /// Binary-reward credit to every revealed group. Windowed, the
  /// parameters are recomputed as a pure function of the buffered events.
  void update(const std::vector<int>& revealed, int reward);

 private:
  struct Event {
    std::vector<int> revealed;
    int reward;
  };

  std::vector<double> alpha_;
  std::vector<double> beta_;
  std::optional<int> window_;
  std::deque<Event> buffer_;

  void check_groups(const std::vector<int>& groups) const;
};

}  // namespace cabo
