#include "cabo/environment.hpp"

#include <filesystem>
#include <fstream>

#include "cabo/errors.hpp"
#include "cabo/rng.hpp"
#include "doctest.h"

using cabo::BudgetError;
using cabo::DataError;
using cabo::FeatureGroupSchema;
using cabo::LabeledDataset;
using cabo::RevealSession;
using cabo::SessionStateError;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

std::filesystem::path write_file(const std::string& name, const std::string& content) {
  const auto path = temp_file(name);
  std::ofstream out(path);
  out << content;
  return path;
}

LabeledDataset tiny_dataset() {
  LabeledDataset ds;
  ds.name = "tiny";
  ds.features.resize(3, 4);
  ds.features << 1.0, 0.2, 0.3, 0.4,  //
      0.5, 0.6, 0.7, 0.8,             //
      0.0, 1.0, 0.5, 0.25;
  ds.labels = {0, 1, 0};
  ds.num_classes = 2;
  ds.schema = FeatureGroupSchema(4, {0}, {{1}, {2}, {3}});
  return ds;
}

}  // namespace

TEST_CASE("load_csv: parsing, label mapping, normalization") {
  const auto path = write_file("cabo_ok.csv",
                               "a,label,b,c\n"
                               "1,cat,10,5\n"
                               "2,dog,30,5\n"
                               "4,cat,20,5\n");
  const LabeledDataset ds = cabo::load_csv(path.string(), "label");
  CHECK(ds.num_events() == 3);
  CHECK(ds.num_features() == 3);
  CHECK(ds.num_classes == 2);
  // labels sort lexicographically: cat -> 0, dog -> 1
  CHECK(ds.labels == std::vector<int>{0, 1, 0});
  // column a: 1,2,4 -> 0, 1/3, 1
  CHECK(ds.features(0, 0) == doctest::Approx(0.0));
  CHECK(ds.features(1, 0) == doctest::Approx(1.0 / 3));
  CHECK(ds.features(2, 0) == doctest::Approx(1.0));
  // constant column c maps to zero
  CHECK(ds.features.col(2).isZero(0.0));
  // default schema: all unknown singletons
  CHECK(ds.schema.num_groups() == 3);
  CHECK(ds.schema.observed().empty());
}

TEST_CASE("load_csv: numeric labels sort by value") {
  const auto path = write_file("cabo_num.csv",
                               "label,x\n"
                               "7,1\n"
                               "3,2\n"
                               "7,3\n");
  const LabeledDataset ds = cabo::load_csv(path.string(), "label");
  CHECK(ds.labels == std::vector<int>{1, 0, 1});
  CHECK(ds.num_classes == 2);
}

TEST_CASE("load_csv: distinct failure modes") {
  CHECK_THROWS_AS(cabo::load_csv("/no/such/file.csv", "label"), DataError);

  const auto ragged = write_file("cabo_ragged.csv", "label,x,y\n1,2,3\n1,2\n");
  CHECK_THROWS_AS(cabo::load_csv(ragged.string(), "label"), DataError);

  const auto nonnum = write_file("cabo_nonnum.csv", "label,x\n1,2\n1,oops\n");
  CHECK_THROWS_AS(cabo::load_csv(nonnum.string(), "label"), DataError);

  const auto nolabel = write_file("cabo_nolabel.csv", "a,b\n1,2\n");
  CHECK_THROWS_AS(cabo::load_csv(nolabel.string(), "label"), DataError);

  const auto empty_label = write_file("cabo_emptylabel.csv", "label,x\n1,2\n,3\n");
  CHECK_THROWS_AS(cabo::load_csv(empty_label.string(), "label"), DataError);

  const auto missing = write_file("cabo_missing.csv", "label,x,y\n1,2,\n0,1,2\n");
  CHECK_THROWS_AS(cabo::load_csv(missing.string(), "label"), DataError);

  const auto one_class = write_file("cabo_oneclass.csv", "label,x\n1,2\n1,3\n");
  CHECK_THROWS_AS(cabo::load_csv(one_class.string(), "label"), DataError);
}

TEST_CASE("split_known: rounding, determinism, edge fractions") {
  LabeledDataset ds;
  ds.name = "wide";
  ds.features = Eigen::MatrixXd::Zero(4, 93);
  ds.labels = {0, 1, 0, 1};
  ds.num_classes = 2;
  ds.schema = FeatureGroupSchema::all_unknown_singletons(93);

  const auto schema = cabo::split_known(ds, 0.10, 7);
  CHECK(schema.observed().size() == 9);  // round-half-up(9.3)
  CHECK(schema.num_groups() == 84);

  const auto again = cabo::split_known(ds, 0.10, 7);
  CHECK(schema.observed() == again.observed());

  const auto none = cabo::split_known(ds, 0.0, 7);
  CHECK(none.observed().empty());
  CHECK(none.num_groups() == 93);

  CHECK_THROWS_AS(cabo::split_known(ds, 1.0, 7), cabo::ConfigError);

  // round-half-up lands 4.65 -> 5 at fraction 0.05
  CHECK(cabo::split_known(ds, 0.05, 1).observed().size() == 5);
}

TEST_CASE("make_nonstationary: observed frozen, rows selected not invented") {
  const int t_count = 400;
  LabeledDataset ds;
  ds.name = "drift";
  ds.features.resize(t_count, 3);
  for (int t = 0; t < t_count; ++t) {
    ds.features(t, 0) = static_cast<double>(t) / t_count;  // observed
    ds.features(t, 1) = static_cast<double>(t) / t_count;  // unknown, unique per row
    ds.features(t, 2) = 1.0 - static_cast<double>(t) / t_count;
  }
  ds.labels.assign(static_cast<std::size_t>(t_count), 0);
  for (int t = 0; t < t_count; ++t) ds.labels[static_cast<std::size_t>(t)] = t % 5;
  ds.num_classes = 5;
  ds.schema = FeatureGroupSchema(3, {0}, {{1}, {2}});

  const LabeledDataset out = cabo::make_nonstationary(ds, 99);
  REQUIRE(out.num_events() == t_count);
  CHECK(out.features.col(0) == ds.features.col(0));

  // Every output row's (unknown features, label) must exist verbatim in the
  // input: the transform permutes and selects, never invents values.
  int replaced = 0;
  for (int t = 0; t < t_count; ++t) {
    bool found = false;
    for (int s = 0; s < t_count && !found; ++s) {
      found = out.features(t, 1) == ds.features(s, 1) &&
              out.features(t, 2) == ds.features(s, 2) &&
              out.labels[static_cast<std::size_t>(t)] == ds.labels[static_cast<std::size_t>(s)];
    }
    REQUIRE(found);
    if (out.features(t, 1) != ds.features(t, 1)) ++replaced;
  }
  // The ramp makes late events near-certain replacements.
  CHECK(replaced > t_count / 3);
  CHECK(out.features(t_count - 1, 1) != ds.features(t_count - 1, 1));  // p = 1 at the end

  // Deterministic per seed.
  const LabeledDataset rerun = cabo::make_nonstationary(ds, 99);
  CHECK(rerun.features == out.features);
  CHECK(rerun.labels == out.labels);
}

TEST_CASE("make_nonstationary: first-decile replacement rate matches the ramp") {
  const int t_count = 10000;
  LabeledDataset ds;
  ds.features.resize(t_count, 2);
  for (int t = 0; t < t_count; ++t) {
    ds.features(t, 0) = 0.5;
    ds.features(t, 1) = static_cast<double>(t) / t_count;
  }
  ds.labels.assign(static_cast<std::size_t>(t_count), 0);
  for (int t = 0; t < t_count; ++t) ds.labels[static_cast<std::size_t>(t)] = t % 2;
  ds.num_classes = 2;
  ds.schema = FeatureGroupSchema(2, {0}, {{1}});

  const LabeledDataset out = cabo::make_nonstationary(ds, 5);
  int replaced = 0;
  for (int t = 0; t < t_count / 10; ++t) {
    if (out.features(t, 1) != ds.features(t, 1)) ++replaced;
  }
  // Expected rate over the first decile is ~0.05 (mean of 1/T..0.1).
  const double rate = static_cast<double>(replaced) / (t_count / 10);
  CHECK(rate == doctest::Approx(0.05).epsilon(0.4));  // 0.05 +/- 0.02
}

TEST_CASE("synth_skills: shapes, determinism, validation") {
  const std::vector<int> paper_sizes = {181, 9, 4, 7, 6, 27, 110, 297, 30};
  const LabeledDataset ds = cabo::synth_skills(100, 9, paper_sizes, 50, 42);
  CHECK(ds.num_features() == 721);  // 50 query + 671 skill features
  CHECK(ds.num_classes == 9);
  CHECK(ds.schema.num_groups() == 9);
  CHECK(ds.schema.observed().size() == 50);
  CHECK(ds.features.minCoeff() >= 0.0);
  CHECK(ds.features.maxCoeff() <= 1.0);

  const LabeledDataset minimal = cabo::synth_skills(10, 2, {1, 1}, 1, 1);
  CHECK(minimal.num_features() == 3);
  CHECK(minimal.num_classes == 2);

  const LabeledDataset again = cabo::synth_skills(100, 9, paper_sizes, 50, 42);
  CHECK(again.features == ds.features);
  CHECK(again.labels == ds.labels);

  CHECK_THROWS_AS(cabo::synth_skills(100, 3, {1, 1}, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(cabo::synth_skills(100, 2, {1, 0}, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(cabo::synth_skills(0, 2, {1, 1}, 5, 1), std::invalid_argument);
}

TEST_CASE("schema file round trip through write_schema/read_schema") {
  const LabeledDataset ds = cabo::synth_skills(5, 3, {2, 1, 3}, 4, 9);
  const auto path = temp_file("cabo_schema.txt");
  cabo::write_schema(ds.schema, path.string());
  const FeatureGroupSchema back = cabo::read_schema(path.string(), 10);
  CHECK(back.observed() == ds.schema.observed());
  CHECK(back.groups() == ds.schema.groups());
  CHECK(back.group_names() == ds.schema.group_names());
}

TEST_CASE("read_schema: unmentioned indices become observed, errors are data errors") {
  const auto path = write_file("cabo_schema2.txt", "g_a: 1-2\ng_b: 4\n");
  const FeatureGroupSchema schema = cabo::read_schema(path.string(), 5);
  CHECK(schema.observed() == std::vector<int>{0, 3});
  CHECK(schema.groups() == std::vector<std::vector<int>>{{1, 2}, {4}});

  const auto dup = write_file("cabo_schema3.txt", "g_a: 1\ng_b: 1\n");
  CHECK_THROWS_AS(cabo::read_schema(dup.string(), 3), DataError);
  const auto oob = write_file("cabo_schema4.txt", "g_a: 9\n");
  CHECK_THROWS_AS(cabo::read_schema(oob.string(), 3), DataError);
  const auto nogroups = write_file("cabo_schema5.txt", "observed: 0-2\n");
  CHECK_THROWS_AS(cabo::read_schema(nogroups.string(), 3), DataError);
}

TEST_CASE("csv round trip keeps schema, labels and event shape") {
  const LabeledDataset ds = cabo::synth_skills(50, 3, {2, 1, 3}, 4, 11);
  const auto csv = temp_file("cabo_rt.csv");
  const auto schema = temp_file("cabo_rt.schema");
  cabo::write_csv(ds, csv.string());
  cabo::write_schema(ds.schema, schema.string());
  const LabeledDataset back = cabo::load_csv(csv.string(), "label", schema.string());
  CHECK(back.num_events() == ds.num_events());
  CHECK(back.num_features() == ds.num_features());
  CHECK(back.labels == ds.labels);
  CHECK(back.schema.groups() == ds.schema.groups());
  CHECK(back.num_classes == ds.num_classes);
}

TEST_CASE("reveal session: reward rule and state machine") {
  const LabeledDataset ds = tiny_dataset();

  SUBCASE("correct arm pays 1, wrong arm pays 0") {
    RevealSession right(ds, 1, 0);
    CHECK(right.commit_arm(1) == 1.0);
    RevealSession wrong(ds, 1, 0);
    CHECK(wrong.commit_arm(0) == 0.0);
  }

  SUBCASE("reveal returns the row's group values and respects the budget") {
    RevealSession session(ds, 0, 2);
    const Eigen::VectorXd obs = session.observed_values();
    CHECK(obs.size() == 1);
    CHECK(obs(0) == doctest::Approx(1.0));
    const Eigen::VectorXd g0 = session.reveal(0);
    CHECK(g0.size() == 1);
    CHECK(g0(0) == doctest::Approx(0.2));
    CHECK(session.reveal(2)(0) == doctest::Approx(0.4));
    CHECK_THROWS_AS(session.reveal(1), BudgetError);  // third reveal, budget 2
  }

  SUBCASE("repeat reveal, reveal after commit, double commit") {
    RevealSession session(ds, 0, 3);
    session.reveal(1);
    CHECK_THROWS_AS(session.reveal(1), std::invalid_argument);
    session.commit_arm(0);
    CHECK_THROWS_AS(session.reveal(2), SessionStateError);
    CHECK_THROWS_AS(session.commit_arm(0), SessionStateError);
  }

  SUBCASE("invalid indices") {
    RevealSession session(ds, 0, 3);
    CHECK_THROWS_AS(session.reveal(5), std::invalid_argument);
    CHECK_THROWS_AS(session.commit_arm(9), std::invalid_argument);
    CHECK_THROWS_AS(RevealSession(ds, 99, 0), std::invalid_argument);
    CHECK_THROWS_AS(RevealSession(ds, 0, 17), cabo::ConfigError);
  }
}
