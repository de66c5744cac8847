#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cabo/arm_policies.hpp"
#include "cabo/environment.hpp"

namespace cabo {

// Reveal budget as either a fraction of the unknown groups or an absolute
// group count; fractions resolve with round-half-up.
struct BudgetSpec {
  double fraction = -1.0;
  int count = -1;

  static BudgetSpec of_fraction(double f);
  static BudgetSpec of_count(int c);
  /// Accepts "40%", "0.4" (fractions) or "3" (count).
  static BudgetSpec parse(const std::string& text);
  int resolve(int num_groups) const;
  std::string describe() const;
};

struct ExperimentConfig {
  std::string dataset_csv;
  std::string label_column = "label";
  std::string schema_file;          // empty: split_known(known_fraction) applies
  std::string dataset_name;         // echo; defaults to the CSV stem
  PolicySpec policy;
  std::string policy_name = "catso";
  double known_fraction = 0.10;
  BudgetSpec budget;
  int runs = 10;
  std::uint64_t base_seed = 0;
  bool nonstationary_env = false;
  Eigen::Index max_events = 0;      // 0 = stream every event
  int threads = 0;                  // 0 = hardware concurrency
};

struct RunSummary {
  ExperimentConfig config;
  std::string dataset_name;
  int resolved_budget = 0;
  int resolved_stages = 1;
  Eigen::Index events = 0;
  std::vector<double> per_run_reward;     // total average reward, run order
  double mean = 0.0;
  double stddev = 0.0;                    // sample std; 0 for a single run
  std::vector<double> mean_trajectory;    // cumulative average, 100-scaled
  double wall_seconds = 0.0;
};

using PolicyFactory = std::function<std::unique_ptr<EventPolicy>(
    const LabeledDataset& dataset, int budget, std::uint64_t run_seed)>;

/// Load + prepare the config's dataset: CSV, schema file or known split,
/// optional nonstationary transform.
LabeledDataset prepare_dataset(const ExperimentConfig& config);

/// R independent seeded runs (seeds base+1..base+R) streaming every event
/// through the policy; total average reward per run is 100 * sum(r) / T.
/// Runs execute in parallel; results are identical at any thread count.
RunSummary run_experiment(const ExperimentConfig& config);
RunSummary run_experiment(const ExperimentConfig& config, const LabeledDataset& prepared);
RunSummary run_experiment(const ExperimentConfig& config, const LabeledDataset& prepared,
                          const PolicyFactory& factory);

/// Validates every config and output path up front, then runs each cell.
std::vector<RunSummary> sweep(const std::vector<ExperimentConfig>& configs,
                              const std::string& out_prefix);

/// Writes {prefix}_summary.csv, {prefix}_runs.jsonl and one trajectory CSV
/// per cell. All floats carry 6 significant digits; reruns with the same
/// seeds produce byte-identical files.
void emit(const std::vector<RunSummary>& summaries, const std::string& out_prefix);

/// Default factory: the orchestration policy described by config.policy.
PolicyFactory orchestration_factory(const ExperimentConfig& config);

}  // namespace cabo
