#include "cabo/environment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include "cabo/errors.hpp"
#include "cabo/rng.hpp"

namespace cabo {

namespace {

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    out.push_back(trim(std::string_view(line).substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

bool parse_double(const std::string& cell, double& out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

LabeledDataset load_csv(const std::string& path, const std::string& label_column,
                        const std::string& schema_path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw DataError("load_csv: empty file '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split(line, ',');

  int label_idx = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == label_column) label_idx = static_cast<int>(i);
  }
  if (label_idx < 0) {
    throw DataError("load_csv: label column '" + label_column + "' not found in '" + path + "'");
  }
  const int n_cols = static_cast<int>(header.size());
  const int n_features = n_cols - 1;
  if (n_features < 1) throw DataError("load_csv: no feature columns in '" + path + "'");

  std::vector<double> values;  // row-major feature block
  std::vector<std::string> raw_labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    if (static_cast<int>(cells.size()) != n_cols) {
      throw DataError("load_csv: ragged row at line " + std::to_string(line_no) + " of '" +
                      path + "' (" + std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(n_cols) + ")");
    }
    for (int c = 0; c < n_cols; ++c) {
      const std::string& cell = cells[static_cast<std::size_t>(c)];
      if (c == label_idx) {
        if (cell.empty()) {
          throw DataError("load_csv: unknown label value (empty) at line " +
                          std::to_string(line_no) + " of '" + path + "'");
        }
        raw_labels.push_back(cell);
        continue;
      }
      if (cell.empty()) {
        throw DataError("load_csv: missing value at line " + std::to_string(line_no) + " of '" +
                        path + "'");
      }
      double v = 0.0;
      if (!parse_double(cell, v)) {
        throw DataError("load_csv: non-numeric cell '" + cell + "' at line " +
                        std::to_string(line_no) + " of '" + path + "'");
      }
      values.push_back(v);
    }
  }

  const Eigen::Index rows = static_cast<Eigen::Index>(raw_labels.size());
  if (rows < 1) throw DataError("load_csv: no data rows in '" + path + "'");

  LabeledDataset ds;
  ds.features.resize(rows, n_features);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < n_features; ++c) {
      ds.features(r, c) = values[static_cast<std::size_t>(r) * n_features + c];
    }
  }

  // Distinct label values become class indices; numeric labels sort by
  // value so class 0 is the smallest, otherwise lexicographic.
  bool all_numeric = true;
  std::vector<double> numeric(raw_labels.size());
  for (std::size_t i = 0; i < raw_labels.size(); ++i) {
    if (!parse_double(raw_labels[i], numeric[i])) {
      all_numeric = false;
      break;
    }
  }
  std::map<std::string, int> label_ids;
  if (all_numeric) {
    std::map<double, std::string> by_value;
    for (std::size_t i = 0; i < raw_labels.size(); ++i) by_value[numeric[i]] = raw_labels[i];
    int next = 0;
    std::map<double, int> value_ids;
    for (const auto& [v, s] : by_value) value_ids[v] = next++;
    ds.labels.resize(raw_labels.size());
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
      ds.labels[i] = value_ids[numeric[i]];
    }
    ds.num_classes = next;
  } else {
    for (const auto& s : raw_labels) label_ids.emplace(s, 0);
    int next = 0;
    for (auto& [s, id] : label_ids) id = next++;
    ds.labels.resize(raw_labels.size());
    for (std::size_t i = 0; i < raw_labels.size(); ++i) ds.labels[i] = label_ids[raw_labels[i]];
    ds.num_classes = next;
  }
  if (ds.num_classes < 2) {
    throw DataError("load_csv: need at least two label classes in '" + path + "'");
  }

  // Per-feature min-max to [0,1]; zero-range columns map to 0.
  for (Eigen::Index c = 0; c < ds.features.cols(); ++c) {
    const double lo = ds.features.col(c).minCoeff();
    const double hi = ds.features.col(c).maxCoeff();
    if (hi > lo) {
      ds.features.col(c) = (ds.features.col(c).array() - lo) / (hi - lo);
    } else {
      ds.features.col(c).setZero();
    }
  }

  ds.name = std::filesystem::path(path).stem().string();
  if (schema_path.empty()) {
    ds.schema = FeatureGroupSchema::all_unknown_singletons(n_features);
  } else {
    ds.schema = read_schema(schema_path, n_features);
  }
  return ds;
}

FeatureGroupSchema split_known(const LabeledDataset& dataset, double fraction,
                               std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw ConfigError("split_known: known fraction must lie in [0, 1)");
  }
  const int n = static_cast<int>(dataset.num_features());
  const int n_observed = round_half_up(fraction * n);

  std::vector<int> indices(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) indices[static_cast<std::size_t>(i)] = i;
  auto rng = make_stream(seed, Stream::DataPrep);
  shuffle(indices, rng);
  std::vector<int> observed(indices.begin(), indices.begin() + n_observed);
  return FeatureGroupSchema::with_observed(n, std::move(observed));
}

LabeledDataset make_nonstationary(const LabeledDataset& dataset, std::uint64_t seed) {
  const Eigen::Index t_count = dataset.num_events();
  std::vector<int> unknown;
  for (const auto& g : dataset.schema.groups()) unknown.insert(unknown.end(), g.begin(), g.end());

  auto rng = make_stream(seed, Stream::DataPrep);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(t_count));
  for (Eigen::Index t = 0; t < t_count; ++t) perm[static_cast<std::size_t>(t)] = t;
  shuffle(perm, rng);

  LabeledDataset out = dataset;
  out.name = dataset.name + "_nonstationary";
  for (Eigen::Index t = 0; t < t_count; ++t) {
    // Replacement probability ramps uniformly: event 1 -> 1/T, event T -> 1.
    const double p = static_cast<double>(t + 1) / static_cast<double>(t_count);
    if (uniform_unit(rng) < p) {
      const Eigen::Index src = perm[static_cast<std::size_t>(t)];
      for (int c : unknown) out.features(t, c) = dataset.features(src, c);
      out.labels[static_cast<std::size_t>(t)] = dataset.labels[static_cast<std::size_t>(src)];
    }
  }
  return out;
}

LabeledDataset synth_skills(int n_events, int n_skills, const std::vector<int>& group_sizes,
                            int query_dim, std::uint64_t seed) {
  if (n_skills < 2) throw std::invalid_argument("synth_skills: need at least two skills");
  if (n_events < 1) throw std::invalid_argument("synth_skills: need at least one event");
  if (query_dim < 1) throw std::invalid_argument("synth_skills: query_dim must be >= 1");
  if (static_cast<int>(group_sizes.size()) != n_skills) {
    throw std::invalid_argument("synth_skills: one group size per skill required");
  }
  for (int s : group_sizes) {
    if (s < 1) throw std::invalid_argument("synth_skills: group sizes must be >= 1");
  }

  int n_features = query_dim;
  std::vector<std::vector<int>> groups;
  std::vector<std::string> names;
  for (int j = 0; j < n_skills; ++j) {
    std::vector<int> g(static_cast<std::size_t>(group_sizes[static_cast<std::size_t>(j)]));
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = n_features + static_cast<int>(i);
    n_features += static_cast<int>(g.size());
    groups.push_back(std::move(g));
    names.push_back("skill" + std::to_string(j + 1));
  }
  std::vector<int> observed(static_cast<std::size_t>(query_dim));
  for (int i = 0; i < query_dim; ++i) observed[static_cast<std::size_t>(i)] = i;

  auto rng = make_stream(seed, Stream::DataPrep);
  Eigen::MatrixXd centers(n_skills, query_dim);
  for (Eigen::Index k = 0; k < n_skills; ++k) {
    for (Eigen::Index j = 0; j < query_dim; ++j) {
      centers(k, j) = 0.25 + 0.5 * uniform_unit(rng);
    }
  }

  LabeledDataset ds;
  ds.name = "synth_skills";
  ds.num_classes = n_skills;
  ds.features = Eigen::MatrixXd::Zero(n_events, n_features);
  ds.labels.resize(static_cast<std::size_t>(n_events));
  auto clamped = [](double v) { return std::clamp(v, 0.0, 1.0); };

  for (Eigen::Index t = 0; t < n_events; ++t) {
    const int y = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n_skills)));
    ds.labels[static_cast<std::size_t>(t)] = y;
    // Query block: a noisy cluster that only partially identifies the
    // label (most queries draw from another class's cluster), so
    // query-only policies plateau well below the post-reveal ceiling.
    const int query_class =
        uniform_unit(rng) < 0.4
            ? y
            : static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n_skills)));
    for (Eigen::Index j = 0; j < query_dim; ++j) {
      ds.features(t, j) = clamped(centers(query_class, j) + 0.25 * standard_normal(rng));
    }
    // Skill blocks: the correct skill answers with high confidence, the
    // rest hover near zero, so an unrevealed group and a revealed wrong
    // group look alike to a linear payoff model and a revealed right
    // group is pure positive evidence. Intent one-hots are label-keyed
    // for the correct skill and arbitrary for the rest.
    for (int j = 0; j < n_skills; ++j) {
      const auto& g = groups[static_cast<std::size_t>(j)];
      const double conf = (j == y) ? 0.8 + 0.1 * standard_normal(rng)
                                   : 0.05 + 0.05 * standard_normal(rng);
      ds.features(t, g[0]) = clamped(conf);
      if (g.size() > 1) {
        const std::size_t block = g.size() - 1;
        const std::size_t intent = (j == y) ? static_cast<std::size_t>(y) % block
                                            : static_cast<std::size_t>(uniform_below(rng, block));
        ds.features(t, g[1 + intent]) = 1.0;
      }
    }
  }

  FeatureGroupSchema schema(n_features, std::move(observed), std::move(groups));
  schema.set_group_names(std::move(names));
  ds.schema = std::move(schema);
  return ds;
}

FeatureGroupSchema read_schema(const std::string& path, int num_features) {
  std::ifstream in(path);
  if (!in) throw DataError("read_schema: cannot open '" + path + "'");

  std::vector<int> observed;
  std::vector<std::vector<int>> groups;
  std::vector<std::string> names;
  std::vector<bool> mentioned(static_cast<std::size_t>(std::max(num_features, 0)), false);

  auto parse_index = [&](const std::string& tok) {
    double v = 0.0;
    if (!parse_double(tok, v) || v != std::floor(v)) {
      throw DataError("read_schema: bad index '" + tok + "' in '" + path + "'");
    }
    const int idx = static_cast<int>(v);
    if (idx < 0 || idx >= num_features) {
      throw DataError("read_schema: index " + tok + " out of range [0," +
                      std::to_string(num_features) + ") in '" + path + "'");
    }
    return idx;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t colon = stripped.find(':');
    if (colon == std::string::npos) {
      throw DataError("read_schema: missing ':' at line " + std::to_string(line_no) + " of '" +
                      path + "'");
    }
    const std::string name = trim(std::string_view(stripped).substr(0, colon));
    std::vector<int> members;
    for (const std::string& range : split(stripped.substr(colon + 1), ',')) {
      if (range.empty()) continue;
      const std::size_t dash = range.find('-', 1);  // allow plain negative to fail in parse
      if (dash == std::string::npos) {
        members.push_back(parse_index(range));
      } else {
        const int lo = parse_index(trim(std::string_view(range).substr(0, dash)));
        const int hi = parse_index(trim(std::string_view(range).substr(dash + 1)));
        if (hi < lo) {
          throw DataError("read_schema: descending range '" + range + "' in '" + path + "'");
        }
        for (int i = lo; i <= hi; ++i) members.push_back(i);
      }
    }
    if (members.empty()) {
      throw DataError("read_schema: empty group '" + name + "' in '" + path + "'");
    }
    for (int i : members) {
      if (mentioned[static_cast<std::size_t>(i)]) {
        throw DataError("read_schema: feature " + std::to_string(i) + " assigned twice in '" +
                        path + "'");
      }
      mentioned[static_cast<std::size_t>(i)] = true;
    }
    if (name == "observed") {
      observed.insert(observed.end(), members.begin(), members.end());
    } else {
      groups.push_back(std::move(members));
      names.push_back(name);
    }
  }
  // Unmentioned features are freely observed.
  for (int i = 0; i < num_features; ++i) {
    if (!mentioned[static_cast<std::size_t>(i)]) observed.push_back(i);
  }
  if (groups.empty()) {
    throw DataError("read_schema: no unknown groups defined in '" + path + "'");
  }
  try {
    FeatureGroupSchema schema(num_features, std::move(observed), std::move(groups));
    schema.set_group_names(std::move(names));
    return schema;
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("read_schema: ") + e.what());
  }
}

void write_schema(const FeatureGroupSchema& schema, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("write_schema: cannot write '" + path + "'");
  auto write_ranges = [&out](const std::vector<int>& sorted) {
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[j] + 1) ++j;
      if (i > 0) out << ',';
      if (j > i) {
        out << sorted[i] << '-' << sorted[j];
      } else {
        out << sorted[i];
      }
      i = j + 1;
    }
  };
  if (!schema.observed().empty()) {
    out << "observed: ";
    write_ranges(schema.observed());
    out << '\n';
  }
  for (int g = 0; g < schema.num_groups(); ++g) {
    out << schema.group_names()[static_cast<std::size_t>(g)] << ": ";
    write_ranges(schema.group(g));
    out << '\n';
  }
}

void write_csv(const LabeledDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("write_csv: cannot write '" + path + "'");
  out << "label";
  for (Eigen::Index c = 0; c < dataset.num_features(); ++c) out << ",f" << c;
  out << '\n';
  char buf[64];
  for (Eigen::Index r = 0; r < dataset.num_events(); ++r) {
    out << dataset.labels[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < dataset.num_features(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", dataset.features(r, c));
      out << ',' << buf;
    }
    out << '\n';
  }
}

RevealSession::RevealSession(const LabeledDataset& dataset, Eigen::Index event_row, int budget)
    : dataset_(&dataset), row_(event_row), budget_(budget) {
  if (event_row < 0 || event_row >= dataset.num_events()) {
    throw std::invalid_argument("RevealSession: event row out of range");
  }
  if (budget < 0 || budget > dataset.schema.num_groups()) {
    throw ConfigError("RevealSession: budget outside [0, number of unknown groups]");
  }
}

Eigen::VectorXd RevealSession::observed_values() const {
  const auto& idx = dataset_->schema.observed();
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = dataset_->features(row_, idx[i]);
  }
  return out;
}

Eigen::VectorXd RevealSession::reveal(int group) {
  if (committed_) throw SessionStateError("RevealSession: reveal after commit");
  if (group < 0 || group >= dataset_->schema.num_groups()) {
    throw std::invalid_argument("RevealSession: unknown group index");
  }
  if (std::find(revealed_.begin(), revealed_.end(), group) != revealed_.end()) {
    throw std::invalid_argument("RevealSession: group already revealed");
  }
  if (revealed_count() >= budget_) {
    throw BudgetError("RevealSession: reveal budget of " + std::to_string(budget_) +
                      " exhausted");
  }
  revealed_.push_back(group);
  const auto& idx = dataset_->schema.group(group);
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = dataset_->features(row_, idx[i]);
  }
  return out;
}

double RevealSession::commit_arm(int arm) {
  if (committed_) throw SessionStateError("RevealSession: arm already committed");
  if (arm < 0 || arm >= dataset_->num_classes) {
    throw std::invalid_argument("RevealSession: arm index out of range");
  }
  committed_ = true;
  return dataset_->labels[static_cast<std::size_t>(row_)] == arm ? 1.0 : 0.0;
}

RevealSession next_session(const LabeledDataset& dataset,
                           const std::vector<Eigen::Index>& order, Eigen::Index t, int budget) {
  if (t < 0 || static_cast<std::size_t>(t) >= order.size()) {
    throw std::invalid_argument("next_session: event counter out of range");
  }
  return RevealSession(dataset, order[static_cast<std::size_t>(t)], budget);
}

}  // namespace cabo
