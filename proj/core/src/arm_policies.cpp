#include "cabo/arm_policies.hpp"

#include <algorithm>
#include <stdexcept>

#include "cabo/errors.hpp"

namespace cabo {

int argmax_tie_lowest(const std::vector<double>& scores) {
  if (scores.empty()) throw std::invalid_argument("argmax_tie_lowest: empty scores");
  int best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i) {
    if (scores[static_cast<std::size_t>(i)] > scores[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

CtsArmBank::CtsArmBank(int num_arms, Eigen::Index dim, double exploration)
    : exploration_(exploration) {
  if (num_arms < 2) throw std::invalid_argument("CtsArmBank: need at least two arms");
  if (exploration < 0.0) throw std::invalid_argument("CtsArmBank: exploration must be >= 0");
  arms_.reserve(static_cast<std::size_t>(num_arms));
  for (int k = 0; k < num_arms; ++k) arms_.emplace_back(dim);
}

const GaussianLinearEstimator& CtsArmBank::arm(int k) const {
  if (k < 0 || k >= num_arms()) throw std::invalid_argument("CtsArmBank: arm index out of range");
  return arms_[static_cast<std::size_t>(k)];
}

int CtsArmBank::choose(const Eigen::VectorXd& x, std::mt19937_64& rng) {
  std::vector<double> scores(arms_.size());
  for (std::size_t k = 0; k < arms_.size(); ++k) {
    const Eigen::VectorXd mu = arms_[k].sample(exploration_, rng);
    scores[k] = GaussianLinearEstimator::score(mu, x);
  }
  return argmax_tie_lowest(scores);
}

void CtsArmBank::update(int k, const Eigen::VectorXd& x, double reward) {
  if (k < 0 || k >= num_arms()) throw std::invalid_argument("CtsArmBank: arm index out of range");
  arms_[static_cast<std::size_t>(k)].update(x, reward, 1.0);
}

ConstantLambda::ConstantLambda(double value) : value_(value) {
  if (!(value > 0.0 && value <= 1.0)) {
    throw std::invalid_argument("ConstantLambda: value must be in (0, 1]");
  }
}

GpUcbLambda::GpUcbLambda(GpUcbConfig config, int epoch_length, double min_lambda)
    : tuner_(config), epoch_length_(epoch_length), min_lambda_(min_lambda) {
  if (epoch_length_ < 1) throw std::invalid_argument("GpUcbLambda: epoch length must be >= 1");
  if (!(min_lambda_ > 0.0 && min_lambda_ <= 1.0)) {
    throw std::invalid_argument("GpUcbLambda: min lambda must be in (0, 1]");
  }
  current_ = std::max(tuner_.propose(1), min_lambda_);
}

void GpUcbLambda::on_reward(double reward) {
  epoch_reward_ += reward;
  if (++epoch_events_ < epoch_length_) return;
  tuner_.record(current_, epoch_reward_ / epoch_events_);
  ++epochs_;
  current_ = std::max(tuner_.propose(epochs_ + 1), min_lambda_);
  epoch_reward_ = 0.0;
  epoch_events_ = 0;
}

std::vector<int> stage_budgets(int total, int stages) {
  if (stages < 1) throw std::invalid_argument("stage_budgets: need at least one stage");
  if (total < 0) throw std::invalid_argument("stage_budgets: negative budget");
  std::vector<int> out(static_cast<std::size_t>(stages), total / stages);
  for (int s = 0; s < total % stages; ++s) ++out[static_cast<std::size_t>(s)];
  return out;
}

OrchestrationPolicy::OrchestrationPolicy(const PolicySpec& spec, const FeatureGroupSchema& schema,
                                         int num_arms, int budget)
    : kind_(spec.kind),
      schema_(schema),
      arm_bank_(num_arms, schema.num_features(), spec.exploration),
      budget_(budget),
      stages_(spec.stages) {
  const int n_groups = schema_.num_groups();
  switch (kind_) {
    case PolicyKind::CtsQuery:
      budget_ = 0;
      stages_ = 1;
      break;
    case PolicyKind::CtsFull:
      budget_ = n_groups;
      stages_ = 1;
      break;
    case PolicyKind::Tsrc:
      stages_ = 1;
      beta_.emplace(n_groups, spec.window);
      break;
    case PolicyKind::Catso:
      ccb_.emplace(schema_, spec.exploration);
      break;
  }
  if (budget_ < 0 || budget_ > n_groups) {
    throw ConfigError("OrchestrationPolicy: budget outside [0, number of unknown groups]");
  }
  if (stages_ == 0) stages_ = std::max(budget_, 1);  // the S = U mode
  if (stages_ < 1 || stages_ > std::max(budget_, 1)) {
    throw ConfigError("OrchestrationPolicy: stages must lie in [1, max(budget, 1)]");
  }
  if (kind_ == PolicyKind::Catso && spec.gpucb_lambda) {
    lambda_ = std::make_unique<GpUcbLambda>(spec.gpucb, spec.gpucb_epoch_length);
  } else {
    lambda_ = std::make_unique<ConstantLambda>(1.0);
  }
}

EventPolicy::StepResult OrchestrationPolicy::step(RevealSession& session, RunRngs& rngs) {
  if (session.schema().num_features() != schema_.num_features() ||
      session.schema().num_groups() != schema_.num_groups()) {
    throw std::invalid_argument("OrchestrationPolicy::step: session schema mismatch");
  }
  if (session.num_arms() != arm_bank_.num_arms()) {
    throw std::invalid_argument("OrchestrationPolicy::step: arm count mismatch");
  }

  // Contexts are fixed N-vectors; whatever is unrevealed stays zero.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(schema_.num_features());
  const Eigen::VectorXd observed = session.observed_values();
  const auto& observed_idx = schema_.observed();
  for (std::size_t i = 0; i < observed_idx.size(); ++i) {
    x(observed_idx[i]) = observed(static_cast<Eigen::Index>(i));
  }

  StepResult result;
  std::vector<int> remaining(static_cast<std::size_t>(schema_.num_groups()));
  for (int g = 0; g < schema_.num_groups(); ++g) remaining[static_cast<std::size_t>(g)] = g;

  for (int stage_u : stage_budgets(budget_, stages_)) {
    if (stage_u == 0) continue;
    std::vector<int> chosen;
    switch (kind_) {
      case PolicyKind::Catso:
        chosen = ccb_->select(x, remaining, stage_u, rngs.feature);
        break;
      case PolicyKind::Tsrc:
        chosen = beta_->select(remaining, stage_u, rngs.feature);
        break;
      case PolicyKind::CtsFull:
        chosen.assign(remaining.begin(), remaining.begin() + stage_u);
        break;
      case PolicyKind::CtsQuery:
        break;  // budget 0, unreachable
    }
    for (int g : chosen) {
      const Eigen::VectorXd values = session.reveal(g);
      const auto& idx = schema_.group(g);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        x(idx[i]) = values(static_cast<Eigen::Index>(i));
      }
      result.revealed.push_back(g);
    }
    std::vector<int> rest;
    std::set_difference(remaining.begin(), remaining.end(), chosen.begin(), chosen.end(),
                        std::back_inserter(rest));
    remaining = std::move(rest);
  }
  std::sort(result.revealed.begin(), result.revealed.end());

  result.arm = arm_bank_.choose(x, rngs.arm);
  result.reward = session.commit_arm(result.arm);

  arm_bank_.update(result.arm, x, result.reward);
  const double lambda = lambda_->current();
  if (ccb_) ccb_->update(result.revealed, x, result.reward, lambda);
  if (beta_) beta_->update(result.revealed, static_cast<int>(result.reward));
  lambda_->on_reward(result.reward);
  return result;
}

}  // namespace cabo
