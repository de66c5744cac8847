#include "cabo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "cabo/errors.hpp"
#include "cabo/rng.hpp"

namespace cabo {

namespace {

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) {
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  }
  return out;
}

struct RunResult {
  double total_avg_reward = 0.0;
  std::vector<double> trajectory;
};

RunResult execute_run(const LabeledDataset& ds, int budget, std::uint64_t run_seed,
                      Eigen::Index max_events, const PolicyFactory& factory) {
  RunRngs rngs(run_seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(ds.num_events()));
  for (Eigen::Index i = 0; i < ds.num_events(); ++i) order[static_cast<std::size_t>(i)] = i;
  shuffle(order, rngs.env);
  Eigen::Index events = ds.num_events();
  if (max_events > 0) events = std::min(events, max_events);

  std::unique_ptr<EventPolicy> policy = factory(ds, budget, run_seed);
  RunResult result;
  result.trajectory.resize(static_cast<std::size_t>(events));
  double cumulative = 0.0;
  for (Eigen::Index t = 0; t < events; ++t) {
    RevealSession session = next_session(ds, order, t, policy->session_budget());
    const EventPolicy::StepResult step = policy->step(session, rngs);
    cumulative += step.reward;
    result.trajectory[static_cast<std::size_t>(t)] =
        100.0 * cumulative / static_cast<double>(t + 1);
  }
  result.total_avg_reward = 100.0 * cumulative / static_cast<double>(events);
  return result;
}

}  // namespace

BudgetSpec BudgetSpec::of_fraction(double f) {
  if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("budget fraction must lie in [0, 1]");
  BudgetSpec b;
  b.fraction = f;
  return b;
}

BudgetSpec BudgetSpec::of_count(int c) {
  if (c < 0) throw ConfigError("budget count must be >= 0");
  BudgetSpec b;
  b.count = c;
  return b;
}

BudgetSpec BudgetSpec::parse(const std::string& text) {
  if (text.empty()) throw ConfigError("empty budget spec");
  std::string body = text;
  bool percent = false;
  if (body.back() == '%') {
    percent = true;
    body.pop_back();
  }
  double value = 0.0;
  const char* begin = body.data();
  const char* end = begin + body.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("bad budget spec '" + text + "'");
  }
  if (percent) return of_fraction(value / 100.0);
  // Integers >= 2 are group counts; 0, 1 and anything fractional are
  // fractions of the unknown groups (0 = reveal nothing, 1 = everything).
  if (value == std::floor(value) && value >= 2.0) return of_count(static_cast<int>(value));
  return of_fraction(value);
}

int BudgetSpec::resolve(int num_groups) const {
  int resolved = 0;
  if (count >= 0) {
    resolved = count;
  } else if (fraction >= 0.0) {
    resolved = round_half_up(fraction * num_groups);
  } else {
    throw ConfigError("budget spec not set");
  }
  if (resolved > num_groups) {
    throw ConfigError("budget " + std::to_string(resolved) + " exceeds the " +
                      std::to_string(num_groups) + " unknown groups");
  }
  return resolved;
}

std::string BudgetSpec::describe() const {
  if (count >= 0) return std::to_string(count);
  return fmt6(fraction * 100.0) + "%";
}

LabeledDataset prepare_dataset(const ExperimentConfig& config) {
  LabeledDataset ds = load_csv(config.dataset_csv, config.label_column, config.schema_file);
  if (!config.dataset_name.empty()) ds.name = config.dataset_name;
  if (config.schema_file.empty()) {
    ds.schema = split_known(ds, config.known_fraction, config.base_seed);
  }
  if (config.nonstationary_env) {
    ds = make_nonstationary(ds, config.base_seed);
  }
  return ds;
}

PolicyFactory orchestration_factory(const ExperimentConfig& config) {
  const PolicySpec spec = config.policy;
  return [spec](const LabeledDataset& ds, int budget, std::uint64_t) {
    return std::make_unique<OrchestrationPolicy>(spec, ds.schema, ds.num_classes, budget);
  };
}

RunSummary run_experiment(const ExperimentConfig& config) {
  const LabeledDataset ds = prepare_dataset(config);
  return run_experiment(config, ds);
}

RunSummary run_experiment(const ExperimentConfig& config, const LabeledDataset& prepared) {
  return run_experiment(config, prepared, orchestration_factory(config));
}

RunSummary run_experiment(const ExperimentConfig& config, const LabeledDataset& prepared,
                          const PolicyFactory& factory) {
  if (config.runs < 1) throw ConfigError("run_experiment: runs must be >= 1");
  const auto start = std::chrono::steady_clock::now();

  const int budget = config.budget.resolve(prepared.schema.num_groups());

  RunSummary summary;
  summary.config = config;
  summary.dataset_name = prepared.name;
  summary.resolved_budget = budget;
  {
    // Probe policy construction once up front so configuration errors
    // surface before any run starts.
    auto probe = factory(prepared, budget, config.base_seed + 1);
    summary.resolved_stages = 1;
    if (auto* orch = dynamic_cast<OrchestrationPolicy*>(probe.get())) {
      summary.resolved_stages = orch->stages();
      summary.resolved_budget = orch->budget();
    }
  }
  summary.events = prepared.num_events();
  if (config.max_events > 0) summary.events = std::min(summary.events, config.max_events);

  const int runs = config.runs;
  std::vector<RunResult> results(static_cast<std::size_t>(runs));
  unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                        : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min(workers, static_cast<unsigned>(runs)));

  std::atomic<int> next_run{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    while (true) {
      const int r = next_run.fetch_add(1);
      if (r >= runs || failed.load()) break;
      try {
        results[static_cast<std::size_t>(r)] =
            execute_run(prepared, budget, config.base_seed + 1 + static_cast<std::uint64_t>(r),
                        config.max_events, factory);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failed.store(true);
        try {
          throw;
        } catch (const std::exception& e) {
          failure = e.what();
        } catch (...) {
          failure = "unknown run failure";
        }
        break;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw NumericError("run_experiment: " + failure);

  // Deterministic reduction in run order, independent of the pool size.
  summary.per_run_reward.resize(static_cast<std::size_t>(runs));
  summary.mean_trajectory.assign(results.front().trajectory.size(), 0.0);
  for (int r = 0; r < runs; ++r) {
    const RunResult& res = results[static_cast<std::size_t>(r)];
    summary.per_run_reward[static_cast<std::size_t>(r)] = res.total_avg_reward;
    for (std::size_t t = 0; t < summary.mean_trajectory.size(); ++t) {
      summary.mean_trajectory[t] += res.trajectory[t];
    }
  }
  for (double& v : summary.mean_trajectory) v /= runs;

  double sum = 0.0;
  for (double v : summary.per_run_reward) sum += v;
  summary.mean = sum / runs;
  double sq = 0.0;
  for (double v : summary.per_run_reward) sq += (v - summary.mean) * (v - summary.mean);
  summary.stddev = runs > 1 ? std::sqrt(sq / (runs - 1)) : 0.0;

  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

std::vector<RunSummary> sweep(const std::vector<ExperimentConfig>& configs,
                              const std::string& out_prefix) {
  if (configs.empty()) throw ConfigError("sweep: no experiments configured");

  // Surface config, data and output-path problems before any compute.
  if (!out_prefix.empty()) {
    const std::filesystem::path probe = out_prefix + "_summary.csv";
    if (probe.has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(probe.parent_path(), ec);
    }
    std::ofstream test(probe, std::ios::app);
    if (!test) throw ConfigError("sweep: cannot write output path '" + probe.string() + "'");
  }

  struct PreparedKey {
    std::string csv, schema, label;
    double fraction;
    bool nonstat;
    std::uint64_t seed;
    bool operator==(const PreparedKey&) const = default;
  };
  std::vector<std::pair<PreparedKey, LabeledDataset>> cache;

  std::vector<RunSummary> summaries;
  summaries.reserve(configs.size());
  for (const ExperimentConfig& config : configs) {
    const PreparedKey key{config.dataset_csv, config.schema_file, config.label_column,
                          config.known_fraction, config.nonstationary_env, config.base_seed};
    const LabeledDataset* ds = nullptr;
    for (const auto& [k, d] : cache) {
      if (k == key) ds = &d;
    }
    if (!ds) {
      cache.emplace_back(key, prepare_dataset(config));
      ds = &cache.back().second;
    }
    summaries.push_back(run_experiment(config, *ds));
  }
  if (!out_prefix.empty()) emit(summaries, out_prefix);
  return summaries;
}

void emit(const std::vector<RunSummary>& summaries, const std::string& out_prefix) {
  const std::filesystem::path summary_path = out_prefix + "_summary.csv";
  if (summary_path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(summary_path.parent_path(), ec);
  }

  std::ofstream csv(summary_path, std::ios::trunc);
  if (!csv) throw ConfigError("emit: cannot write '" + summary_path.string() + "'");
  csv << "dataset,policy,U,S,mean,std,runs,seed\n";
  for (const RunSummary& s : summaries) {
    csv << s.dataset_name << ',' << s.config.policy_name << ',' << s.resolved_budget << ','
        << s.resolved_stages << ',' << fmt6(s.mean) << ',' << fmt6(s.stddev) << ','
        << s.config.runs << ',' << s.config.base_seed << '\n';
  }
  csv.close();

  std::ofstream jsonl(out_prefix + "_runs.jsonl", std::ios::trunc);
  if (!jsonl) throw ConfigError("emit: cannot write '" + out_prefix + "_runs.jsonl'");
  for (const RunSummary& s : summaries) {
    for (std::size_t r = 0; r < s.per_run_reward.size(); ++r) {
      jsonl << "{\"dataset\":\"" << s.dataset_name << "\",\"policy\":\"" << s.config.policy_name
            << "\",\"U\":" << s.resolved_budget << ",\"S\":" << s.resolved_stages
            << ",\"run\":" << (r + 1) << ",\"seed\":" << (s.config.base_seed + 1 + r)
            << ",\"events\":" << s.events
            << ",\"total_average_reward\":" << fmt6(s.per_run_reward[r]) << "}\n";
    }
  }
  jsonl.close();

  for (const RunSummary& s : summaries) {
    const std::string traj_path = out_prefix + "_" + sanitize(s.dataset_name) + "_" +
                                  sanitize(s.config.policy_name) + "_U" +
                                  std::to_string(s.resolved_budget) + "_S" +
                                  std::to_string(s.resolved_stages) + "_traj.csv";
    std::ofstream traj(traj_path, std::ios::trunc);
    if (!traj) throw ConfigError("emit: cannot write '" + traj_path + "'");
    traj << "event,cum_avg_reward\n";
    for (std::size_t t = 0; t < s.mean_trajectory.size(); ++t) {
      traj << (t + 1) << ',' << fmt6(s.mean_trajectory[t]) << '\n';
    }
  }
}

}  // namespace cabo
