// cabo-bench: declarative experiment runner for budgeted-reveal bandits.
//
//   cabo-bench run   --dataset data/warfarin.csv --policy catso --budget 40% --out results/w40
//   cabo-bench sweep --dataset data/warfarin.csv --policies catso,tsrc \
//                    --budgets 20%,40%,60% --out results/warfarin
//   cabo-bench synth-skills --events 20000 --out data/synth
//
// Every flag can also live in a plain key=value config file passed with
// --config; command-line flags override file values.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cabo/errors.hpp"
#include "cabo/experiment.hpp"

namespace {

struct CommonOptions {
  std::string dataset;
  std::string label_column = "label";
  std::string schema;
  std::string name;
  std::string stages = "1";
  double known_fraction = 0.10;
  double exploration = 0.25;
  int runs = 10;
  std::uint64_t seed = 0;
  bool nonstationary = false;
  int window = 100;
  long long max_events = 0;
  int threads = 0;
  std::string out;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--dataset", opt.dataset, "dataset CSV with a header row");
  cmd->add_option("--label", opt.label_column, "label column name (default: label)");
  cmd->add_option("--schema", opt.schema, "group-schema file; omit to split by --known-fraction");
  cmd->add_option("--name", opt.name, "dataset name override in outputs");
  cmd->add_option("--known-fraction", opt.known_fraction,
                  "fraction of features fixed as freely observed (default 0.10)");
  cmd->add_option("--stages", opt.stages, "reveal stages: a count, or U for one group per stage");
  cmd->add_option("--v", opt.exploration, "Thompson sampling exploration (default 0.25)");
  cmd->add_option("--runs", opt.runs, "independent seeded runs per cell (default 10)");
  cmd->add_option("--seed", opt.seed, "base seed; run r uses seed+r");
  cmd->add_flag("--nonstationary", opt.nonstationary,
                "apply the drift transform to the unknown features");
  cmd->add_option("--window", opt.window, "wtsrc sliding window (default 100)");
  cmd->add_option("--max-events", opt.max_events, "subsample each run to this many events");
  cmd->add_option("--threads", opt.threads, "worker threads across runs (default: hardware)");
  cmd->add_option("--out", opt.out, "output file prefix");
  cmd->add_option("--config", "plain key=value config file; command-line flags override");
}

// Config-file values expand to tokens ahead of the real flags, so the last
// occurrence (the command line) must win everywhere.
void take_last_everywhere(CLI::App* cmd) {
  for (const auto& option : cmd->get_options()) {
    const_cast<CLI::Option*>(option)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }
}

// key=value lines ('#' comments) become --key=value tokens spliced in right
// after the subcommand name, before the explicit command-line flags.
std::vector<std::string> expand_config_file(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw cabo::ConfigError("--config needs a file path");
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty() || args.empty()) return args;

  std::ifstream in(path);
  if (!in) throw cabo::ConfigError("cannot open config file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw cabo::ConfigError("config file '" + path + "' line " + std::to_string(line_no) +
                              ": expected key=value");
    }
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key.empty()) {
      throw cabo::ConfigError("config file '" + path + "' line " + std::to_string(line_no) +
                              ": empty key");
    }
    tokens.push_back("--" + key + "=" + value);
  }
  args.insert(args.begin() + 1, tokens.begin(), tokens.end());
  return args;
}

void require_common(const CommonOptions& opt) {
  if (opt.dataset.empty()) throw cabo::ConfigError("--dataset is required (flag or config file)");
  if (opt.out.empty()) throw cabo::ConfigError("--out is required (flag or config file)");
}

int parse_stages(const std::string& text) {
  if (text == "U" || text == "u") return 0;  // S = U mode
  try {
    return std::stoi(text);
  } catch (const std::exception&) {
    throw cabo::ConfigError("bad --stages value '" + text + "' (expected a count or U)");
  }
}

cabo::PolicySpec make_policy_spec(const std::string& policy, const CommonOptions& opt) {
  cabo::PolicySpec spec;
  spec.exploration = opt.exploration;
  spec.stages = parse_stages(opt.stages);
  if (policy == "catso") {
    spec.kind = cabo::PolicyKind::Catso;
  } else if (policy == "ncatso") {
    spec.kind = cabo::PolicyKind::Catso;
    spec.gpucb_lambda = true;
  } else if (policy == "tsrc") {
    spec.kind = cabo::PolicyKind::Tsrc;
  } else if (policy == "wtsrc") {
    spec.kind = cabo::PolicyKind::Tsrc;
    spec.window = opt.window;
  } else if (policy == "cts-full") {
    spec.kind = cabo::PolicyKind::CtsFull;
  } else if (policy == "cts-query") {
    spec.kind = cabo::PolicyKind::CtsQuery;
  } else {
    throw cabo::ConfigError(
        "unknown policy '" + policy +
        "' (expected catso, ncatso, tsrc, wtsrc, cts-full or cts-query)");
  }
  return spec;
}

cabo::ExperimentConfig make_config(const std::string& policy, const std::string& budget,
                                   const CommonOptions& opt) {
  cabo::ExperimentConfig cfg;
  cfg.dataset_csv = opt.dataset;
  cfg.label_column = opt.label_column;
  cfg.schema_file = opt.schema;
  cfg.dataset_name = opt.name;
  cfg.policy = make_policy_spec(policy, opt);
  cfg.policy_name = policy;
  cfg.known_fraction = opt.known_fraction;
  cfg.budget = cabo::BudgetSpec::parse(budget);
  cfg.runs = opt.runs;
  cfg.base_seed = opt.seed;
  cfg.nonstationary_env = opt.nonstationary;
  cfg.max_events = static_cast<Eigen::Index>(opt.max_events);
  cfg.threads = opt.threads;
  return cfg;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t pos = csv.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(csv.substr(start));
      break;
    }
    out.push_back(csv.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

void print_summaries(const std::vector<cabo::RunSummary>& summaries) {
  std::printf("%-16s %-10s %5s %3s %10s %10s %6s %9s\n", "dataset", "policy", "U", "S", "mean",
              "std", "runs", "wall_s");
  for (const auto& s : summaries) {
    std::printf("%-16s %-10s %5d %3d %10.6g %10.6g %6d %9.1f\n", s.dataset_name.c_str(),
                s.config.policy_name.c_str(), s.resolved_budget, s.resolved_stages, s.mean,
                s.stddev, s.config.runs, s.wall_seconds);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"budgeted-reveal contextual bandit benchmark harness"};
  app.require_subcommand(1);

  CommonOptions run_opt;
  std::string run_policy = "catso";
  std::string run_budget = "0";
  CLI::App* run = app.add_subcommand("run", "run one policy x dataset x budget cell");
  add_common_flags(run, run_opt);
  run->add_option("--policy", run_policy,
                  "catso | ncatso | tsrc | wtsrc | cts-full | cts-query");
  run->add_option("--budget", run_budget, "groups to reveal: fraction (0.4, 40%) or count");
  take_last_everywhere(run);

  CommonOptions sweep_opt;
  std::string sweep_policies = "catso,tsrc";
  std::string sweep_budgets = "20%,40%,60%";
  std::string sweep_vs;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "cross product of policies x budgets [x v]");
  add_common_flags(sweep_cmd, sweep_opt);
  sweep_cmd->add_option("--policies", sweep_policies, "comma-separated policy list");
  sweep_cmd->add_option("--budgets", sweep_budgets, "comma-separated budget list");
  sweep_cmd->add_option("--vs", sweep_vs, "comma-separated exploration sweep, e.g. 0.1,0.25,0.5,1.0");
  take_last_everywhere(sweep_cmd);

  int synth_events = 20000;
  int synth_skills_count = 9;
  std::string synth_sizes = "181,9,4,7,6,27,110,297,30";
  int synth_query_dim = 50;
  std::uint64_t synth_seed = 1;
  std::string synth_out;
  CLI::App* synth = app.add_subcommand("synth-skills", "generate a grouped synthetic dataset");
  synth->add_option("--events", synth_events, "number of events");
  synth->add_option("--skills", synth_skills_count, "number of skills (= arms = groups)");
  synth->add_option("--group-sizes", synth_sizes, "comma-separated feature-group sizes");
  synth->add_option("--query-dim", synth_query_dim, "observed query feature count");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--out", synth_out, "writes <out>.csv and <out>.schema")->required();
  take_last_everywhere(synth);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config_file(std::move(args));
    std::reverse(args.begin(), args.end());  // CLI11 vector parse is reversed
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const cabo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 1;
  }

  try {
    if (*run) {
      require_common(run_opt);
      const auto cfg = make_config(run_policy, run_budget, run_opt);
      const auto summaries = cabo::sweep({cfg}, run_opt.out);
      print_summaries(summaries);
    } else if (*sweep_cmd) {
      require_common(sweep_opt);
      std::vector<cabo::ExperimentConfig> configs;
      for (const std::string& policy : split_list(sweep_policies)) {
        for (const std::string& budget : split_list(sweep_budgets)) {
          if (sweep_vs.empty()) {
            configs.push_back(make_config(policy, budget, sweep_opt));
          } else {
            for (const std::string& v : split_list(sweep_vs)) {
              CommonOptions opt = sweep_opt;
              opt.exploration = std::stod(v);
              auto cfg = make_config(policy, budget, opt);
              cfg.policy_name = policy + "_v" + v;
              configs.push_back(std::move(cfg));
            }
          }
        }
      }
      const auto summaries = cabo::sweep(configs, sweep_opt.out);
      print_summaries(summaries);
    } else if (*synth) {
      std::vector<int> sizes;
      for (const std::string& s : split_list(synth_sizes)) sizes.push_back(std::stoi(s));
      const auto ds =
          cabo::synth_skills(synth_events, synth_skills_count, sizes, synth_query_dim, synth_seed);
      cabo::write_csv(ds, synth_out + ".csv");
      cabo::write_schema(ds.schema, synth_out + ".schema");
      std::printf("wrote %s.csv (%lld events, %lld features, %d classes) and %s.schema\n",
                  synth_out.c_str(), static_cast<long long>(ds.num_events()),
                  static_cast<long long>(ds.num_features()), ds.num_classes, synth_out.c_str());
    }
  } catch (const cabo::DataError& e) {
    std::cerr << "data error: " << e.what() << std::endl;
    return 2;
  } catch (const cabo::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return 3;
  } catch (const cabo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
