#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "cabo/feature_groups.hpp"

namespace cabo {

// Classification dataset replayed as a bandit environment: one event per
// row, arms are the classes, reward 1 iff the chosen arm is the label.
struct LabeledDataset {
  std::string name;
  Eigen::MatrixXd features;  // events x features, columns normalized to [0,1]
  std::vector<int> labels;   // class indices 0..num_classes-1
  int num_classes = 0;
  FeatureGroupSchema schema;

  Eigen::Index num_events() const noexcept { return features.rows(); }
  Eigen::Index num_features() const noexcept { return features.cols(); }
};

/// Parse a headered numeric CSV, min-max normalize each feature column to
/// [0,1] (zero-range columns map to 0), map distinct label values to class
/// indices. `schema_path` empty means every feature is its own unknown
/// group; otherwise the group-schema file is applied and validated.
LabeledDataset load_csv(const std::string& path, const std::string& label_column,
                        const std::string& schema_path = "");

/// Fix round-half-up(fraction * N) uniformly sampled features as observed;
/// the rest become singleton unknown groups. Deterministic per seed.
FeatureGroupSchema split_known(const LabeledDataset& dataset, double fraction,
                               std::uint64_t seed);

/// Simulated drift in the unknown context: duplicate the dataset, permute
/// its (unknown features, label) pairs across events, then replace event t
/// by its shuffled counterpart with probability t/T. Observed columns never
/// move. Deterministic per seed.
LabeledDataset make_nonstationary(const LabeledDataset& dataset, std::uint64_t seed);

/// Synthetic grouped dataset shaped like a skill-orchestration corpus:
/// observed query features drawn from noisy, deliberately ambiguous
/// per-class clusters, one feature group per skill holding a confidence
/// scalar (high iff that skill is the label, near zero otherwise) plus a
/// one-hot intent block. Label = correct skill, so most of the attainable
/// reward sits behind revealing the right groups.
LabeledDataset synth_skills(int n_events, int n_skills, const std::vector<int>& group_sizes,
                            int query_dim, std::uint64_t seed);

/// Group-schema file: one `name: range[,range...]` line per group, ranges
/// `a-b` inclusive or single indices, 0-based feature positions with the
/// label column excluded. The reserved name `observed` lists the freely
/// observed features; indices mentioned nowhere are treated as observed.
FeatureGroupSchema read_schema(const std::string& path, int num_features);
void write_schema(const FeatureGroupSchema& schema, const std::string& path);

/// Writes `label` plus f0..fN-1 columns; pairs with write_schema so
/// synthetic datasets can be reloaded through load_csv.
void write_csv(const LabeledDataset& dataset, const std::string& path);

// One event's budget-enforced access: observed values are free, unknown
// groups cost one reveal each up to the budget, the label stays hidden
// until the arm is committed. Enforcement lives here, not in policies.
class RevealSession {
 public:
  RevealSession(const LabeledDataset& dataset, Eigen::Index event_row, int budget);

  Eigen::Index event_row() const noexcept { return row_; }
  int budget() const noexcept { return budget_; }
  int revealed_count() const noexcept { return static_cast<int>(revealed_.size()); }
  bool committed() const noexcept { return committed_; }
  const FeatureGroupSchema& schema() const noexcept { return dataset_->schema; }
  int num_arms() const noexcept { return dataset_->num_classes; }

  /// Values of the observed features, in schema order. Free.
  Eigen::VectorXd observed_values() const;

  /// Values of one unknown group, in schema order. Counts against the
  /// budget; repeated reveals and reveals after commit are errors.
  Eigen::VectorXd reveal(int group);

  /// Reward 1 iff the arm equals the hidden label; freezes the session.
  double commit_arm(int arm);

 private:
  const LabeledDataset* dataset_;
  Eigen::Index row_;
  int budget_;
  bool committed_ = false;
  std::vector<int> revealed_;
};

/// Session for the t-th event of a replay order.
RevealSession next_session(const LabeledDataset& dataset,
                           const std::vector<Eigen::Index>& order, Eigen::Index t, int budget);

}  // namespace cabo
