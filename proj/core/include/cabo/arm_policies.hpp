#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "cabo/bayes_linear.hpp"
#include "cabo/environment.hpp"
#include "cabo/feature_attention.hpp"
#include "cabo/feature_groups.hpp"
#include "cabo/gpucb.hpp"
#include "cabo/rng.hpp"

namespace cabo {

/// Argmax with ties broken toward the lowest index.
int argmax_tie_lowest(const std::vector<double>& scores);

// Linear Thompson-sampling arm selection: one Gaussian estimator per arm,
// all sharing the context dimension.
class CtsArmBank {
 public:
  CtsArmBank(int num_arms, Eigen::Index dim, double exploration);

  int num_arms() const noexcept { return static_cast<int>(arms_.size()); }
  double exploration() const noexcept { return exploration_; }
  const GaussianLinearEstimator& arm(int k) const;

  /// Sample a coefficient vector per arm, return the argmax of x^T mu_k.
  int choose(const Eigen::VectorXd& x, std::mt19937_64& rng);

  /// Rank-1 update of exactly arm k, decay fixed at 1.
  void update(int k, const Eigen::VectorXd& x, double reward);

 private:
  std::vector<GaussianLinearEstimator> arms_;
  double exploration_;
};

// Where the selector decay lambda(t) comes from.
class LambdaSource {
 public:
  virtual ~LambdaSource() = default;
  virtual double current() const = 0;
  virtual void on_reward(double reward) = 0;
};

class ConstantLambda final : public LambdaSource {
 public:
  explicit ConstantLambda(double value = 1.0);
  double current() const override { return value_; }
  void on_reward(double) override {}

 private:
  double value_;
};

// Epoch-batched GP-UCB decay: one lambda per epoch, the epoch's mean reward
// recorded as that lambda's observation, a fresh proposal each epoch.
// Proposals below min_lambda are clamped before use (a decay of zero would
// erase the precision matrix), and the clamped value is what gets recorded.
class GpUcbLambda final : public LambdaSource {
 public:
  explicit GpUcbLambda(GpUcbConfig config = {}, int epoch_length = 100,
                       double min_lambda = 0.01);
  double current() const override { return current_; }
  void on_reward(double reward) override;
  const GpUcbTuner& tuner() const noexcept { return tuner_; }
  int epochs_completed() const noexcept { return epochs_; }

 private:
  GpUcbTuner tuner_;
  int epoch_length_;
  double min_lambda_;
  double current_;
  double epoch_reward_ = 0.0;
  int epoch_events_ = 0;
  int epochs_ = 0;
};

/// Anything the experiment runner can drive through a reveal session.
class EventPolicy {
 public:
  struct StepResult {
    std::vector<int> revealed;  // ascending group indices
    int arm = -1;
    double reward = 0.0;
  };

  virtual ~EventPolicy() = default;
  virtual StepResult step(RevealSession& session, RunRngs& rngs) = 0;
  /// Reveal budget the session must grant this policy.
  virtual int session_budget() const = 0;
};

enum class PolicyKind { CtsFull, CtsQuery, Catso, Tsrc };

struct PolicySpec {
  PolicyKind kind = PolicyKind::Catso;
  int stages = 1;  // 0 means S = max(U, 1), the incremental-reveal mode
  double exploration = 0.25;
  std::optional<int> window;        // Tsrc only; engaged = sliding-window variant
  bool gpucb_lambda = false;        // Catso only; engaged = nonstationary variant
  GpUcbConfig gpucb;
  int gpucb_epoch_length = 100;
};

/// Number of groups each stage reveals: as even as possible, earlier
/// stages take the remainder (5 over 2 stages -> 3 then 2).
std::vector<int> stage_budgets(int total, int stages);

// One composed budgeted-reveal policy: a reveal selector, a CTS arm bank
// and a decay source, driven through the per-event stage loop.
//
// Per event: read the free features, then for each stage pick u groups
// with the selector against the context revealed so far and merge their
// values in; choose an arm on the final context; collect the reward;
// update the chosen arm (decay 1) and the revealed groups' selector state
// (decay lambda(t)).
class OrchestrationPolicy final : public EventPolicy {
 public:
  OrchestrationPolicy(const PolicySpec& spec, const FeatureGroupSchema& schema, int num_arms,
                      int budget);

  StepResult step(RevealSession& session, RunRngs& rngs) override;
  int session_budget() const override { return budget_; }

  PolicyKind kind() const noexcept { return kind_; }
  int budget() const noexcept { return budget_; }
  int stages() const noexcept { return stages_; }
  const CtsArmBank& arm_bank() const noexcept { return arm_bank_; }
  const CcbFeatureSelector* ccb_selector() const noexcept { return ccb_ ? &*ccb_ : nullptr; }
  CcbFeatureSelector* ccb_selector() noexcept { return ccb_ ? &*ccb_ : nullptr; }
  const BetaFeatureSelector* beta_selector() const noexcept { return beta_ ? &*beta_ : nullptr; }
  const LambdaSource& lambda_source() const noexcept { return *lambda_; }

 private:
  PolicyKind kind_;
  FeatureGroupSchema schema_;
  CtsArmBank arm_bank_;
  std::optional<CcbFeatureSelector> ccb_;
  std::optional<BetaFeatureSelector> beta_;
  std::unique_ptr<LambdaSource> lambda_;
  int budget_;
  int stages_;
};

}  // namespace cabo
