#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "repkit/evaluation.hpp"
#include "repkit/rng.hpp"

using namespace repkit;

namespace {

std::vector<std::string> participants(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "P%03zu", i + 1);
    out.emplace_back(buf);
  }
  return out;
}

FeatureMatrix probs(std::vector<std::vector<double>> rows,
                    std::vector<std::string> classes) {
  FeatureMatrix m(rows.size(), classes.size());
  m.column_names = std::move(classes);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < m.cols; ++c) m.at(r, c) = rows[r][c];
  return m;
}

}  // namespace

TEST_CASE("make_splits produces disjoint grouped splits with the right sizes", "[evaluation]") {
  auto ids = participants(54);
  auto plan = make_splits(ids, 42);
  for (const auto& split : plan.splits) {
    REQUIRE(split.test_participants.size() == 16);  // round(0.3 * 54)
    std::set<std::string> all;
    for (const auto& p : split.train_participants) all.insert(p);
    for (const auto& p : split.validation_participants) all.insert(p);
    for (const auto& p : split.test_participants) all.insert(p);
    REQUIRE(all.size() == 54);  // disjoint and covering

    std::set<std::string> test(split.test_participants.begin(), split.test_participants.end());
    for (const auto& p : split.train_participants) REQUIRE_FALSE(test.count(p));
    for (const auto& p : split.validation_participants) REQUIRE_FALSE(test.count(p));

    // validation = round(0.15 * 38) = 6
    REQUIRE(split.validation_participants.size() == 6);
    REQUIRE(split.train_participants.size() == 32);
  }
}

TEST_CASE("make_splits is deterministic and order-independent", "[evaluation]") {
  auto ids = participants(20);
  auto a = make_splits(ids, 7);
  std::vector<std::string> reversed(ids.rbegin(), ids.rend());
  auto b = make_splits(reversed, 7);
  for (std::size_t s = 0; s < 3; ++s) {
    REQUIRE(a.splits[s].test_participants == b.splits[s].test_participants);
    REQUIRE(a.splits[s].train_participants == b.splits[s].train_participants);
  }
  auto c = make_splits(ids, 8);
  bool any_diff = false;
  for (std::size_t s = 0; s < 3; ++s)
    if (a.splits[s].test_participants != c.splits[s].test_participants) any_diff = true;
  REQUIRE(any_diff);
}

TEST_CASE("make_splits needs ten participants", "[evaluation]") {
  try {
    make_splits(participants(9), 1);
    FAIL("expected too-few-participants");
  } catch (const Error& e) {
    REQUIRE(e.code() == errc::too_few_participants);
  }
}

TEST_CASE("ensemble_predict averages probabilities and breaks ties low", "[evaluation]") {
  auto a = probs({{0.6, 0.4}}, {"c1", "c2"});
  auto b = probs({{0.2, 0.8}}, {"c1", "c2"});
  auto [mean, labels] = ensemble_predict({a, b});
  REQUIRE(mean.at(0, 0) == Catch::Approx(0.4));
  REQUIRE(mean.at(0, 1) == Catch::Approx(0.6));
  REQUIRE(labels[0] == "c2");

  // Identical inputs come back unchanged; a single input is the identity.
  auto [same, labels_same] = ensemble_predict({a, a});
  REQUIRE(same.data == a.data);
  auto [single, labels_single] = ensemble_predict({b});
  REQUIRE(single.data == b.data);

  // Uniform models tie; the tie breaks to the first class.
  auto u = probs({{0.25, 0.25, 0.25, 0.25}}, {"a", "b", "c", "d"});
  auto [mu, lu] = ensemble_predict({u, u, u});
  REQUIRE(lu[0] == "a");
}

TEST_CASE("ensemble mean is permutation-invariant and rows sum to one", "[evaluation]") {
  SplitMix64 rng(5);
  std::vector<FeatureMatrix> models;
  for (int m = 0; m < 4; ++m) {
    FeatureMatrix p(6, 3);
    p.column_names = {"a", "b", "c"};
    for (std::size_t r = 0; r < 6; ++r) {
      double total = 0.0;
      std::vector<double> raw(3);
      for (auto& v : raw) {
        v = 0.05 + rng.next_unit();
        total += v;
      }
      for (std::size_t c = 0; c < 3; ++c) p.at(r, c) = raw[c] / total;
    }
    models.push_back(std::move(p));
  }
  auto [mean_fwd, labels_fwd] = ensemble_predict(models);
  std::vector<FeatureMatrix> reversed(models.rbegin(), models.rend());
  auto [mean_rev, labels_rev] = ensemble_predict(reversed);
  for (std::size_t i = 0; i < mean_fwd.data.size(); ++i)
    REQUIRE(mean_fwd.data[i] == Catch::Approx(mean_rev.data[i]).margin(1e-12));
  for (std::size_t r = 0; r < mean_fwd.rows; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < mean_fwd.cols; ++c) sum += mean_fwd.at(r, c);
    REQUIRE(sum == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("ensemble_predict rejects mismatched inputs", "[evaluation]") {
  auto a = probs({{0.5, 0.5}}, {"c1", "c2"});
  auto b = probs({{0.5, 0.5}}, {"c2", "c1"});
  REQUIRE_THROWS_AS(ensemble_predict({a, b}), Error);
}

TEST_CASE("evaluate computes accuracy, confusion and per-class metrics", "[evaluation]") {
  std::vector<std::string> classes = {"a", "b", "c"};
  std::vector<std::string> truth = {"a", "a", "b", "b", "c", "c", "a", "b"};
  std::vector<std::string> pred = {"a", "b", "b", "b", "c", "a", "a", "c"};
  auto r = evaluate(pred, truth, classes);
  // Hand tally: correct = a,b,b,c,a = 5 of 8.
  REQUIRE(r.accuracy == Catch::Approx(5.0 / 8.0));
  REQUIRE(r.confusion[0][0] == 2);  // a -> a
  REQUIRE(r.confusion[0][1] == 1);  // a -> b
  REQUIRE(r.confusion[1][1] == 2);  // b -> b
  REQUIRE(r.confusion[1][2] == 1);  // b -> c
  REQUIRE(r.confusion[2][2] == 1);  // c -> c
  REQUIRE(r.confusion[2][0] == 1);  // c -> a
  REQUIRE(r.support == std::vector<std::size_t>{3, 3, 2});
  REQUIRE(r.recall[0] == Catch::Approx(2.0 / 3.0));
  REQUIRE(r.precision[0] == Catch::Approx(2.0 / 3.0));
  REQUIRE(r.precision[2] == Catch::Approx(1.0 / 2.0));

  // Perfect predictions give a diagonal matrix.
  auto perfect = evaluate(truth, truth, classes);
  REQUIRE(perfect.accuracy == 1.0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      REQUIRE(perfect.confusion[i][j] == (i == j ? r.support[i] : 0));

  // A constant prediction on balanced 4-class truth scores 0.25.
  std::vector<std::string> classes4 = {"a", "b", "c", "d"};
  std::vector<std::string> truth4 = {"a", "b", "c", "d", "a", "b", "c", "d"};
  std::vector<std::string> const4(8, "a");
  REQUIRE(evaluate(const4, truth4, classes4).accuracy == Catch::Approx(0.25));

  REQUIRE_THROWS_AS(evaluate({"zz"}, {"a"}, classes), Error);
}

TEST_CASE("report mean accuracy is the mean of split accuracies", "[evaluation]") {
  EvaluationReport report;
  report.classes = {"a", "b"};
  std::vector<std::string> truth = {"a", "b", "a", "b"};
  report.splits.push_back(evaluate({"a", "b", "a", "b"}, truth, report.classes));
  report.splits.push_back(evaluate({"a", "b", "a", "a"}, truth, report.classes));
  report.splits.push_back(evaluate({"b", "b", "a", "b"}, truth, report.classes));
  report.finalize();
  double expected = (1.0 + 0.75 + 0.75) / 3.0;
  REQUIRE(report.mean_accuracy == Catch::Approx(expected).margin(1e-12));
}

TEST_CASE("reports round-trip through JSON and render as text", "[evaluation]") {
  EvaluationReport report;
  report.source = "imu";
  report.exercise = "military_press";
  report.classes = {"A", "N"};
  report.config_fingerprint = "cafe";
  report.splits.push_back(evaluate({"A", "N", "N"}, {"A", "N", "A"}, report.classes));
  report.finalize();

  auto j = report_to_json(report);
  auto back = report_from_json(j);
  REQUIRE(back.mean_accuracy == report.mean_accuracy);
  REQUIRE(back.classes == report.classes);
  REQUIRE(back.splits[0].confusion == report.splits[0].confusion);
  REQUIRE(report_to_json(back).dump() == j.dump());

  auto table = report_text_table(report);
  REQUIRE(table.find("imu") != std::string::npos);
  REQUIRE(table.find("mean accuracy") != std::string::npos);
}

TEST_CASE("pair_modalities joins on the full key and drops strays", "[evaluation]") {
  auto sample = [](const std::string& p, const std::string& label, std::size_t rep,
                   Modality m) {
    LabeledSample s;
    s.participant_id = p;
    s.label = label;
    s.repetition_index = rep;
    s.modality = m;
    s.series.channel_names = {"x"};
    s.series.values = {{0.0, 1.0}};
    return s;
  };
  std::vector<LabeledSample> a, b;
  for (std::size_t r = 0; r < 5; ++r) a.push_back(sample("P1", "N", r, Modality::imu));
  for (std::size_t r = 0; r < 5; ++r) b.push_back(sample("P1", "N", r, Modality::video));
  auto paired = pair_modalities(a, b);
  REQUIRE(paired.pairs.size() == 5);
  REQUIRE(paired.dropped_a == 0);
  REQUIRE(paired.dropped_b == 0);

  // Drop one repetition from b.
  b.pop_back();
  auto paired2 = pair_modalities(a, b);
  REQUIRE(paired2.pairs.size() == 4);
  REQUIRE(paired2.dropped_a == 1);

  // Shuffled order pairs identically.
  std::vector<LabeledSample> a_shuffled = {a[3], a[0], a[4], a[1], a[2]};
  auto paired3 = pair_modalities(a_shuffled, b);
  REQUIRE(paired3.pairs.size() == 4);
  for (const auto& [ia, ib] : paired3.pairs)
    REQUIRE(a_shuffled[ia].repetition_index == b[ib].repetition_index);

  std::vector<LabeledSample> c = {sample("P9", "N", 0, Modality::video)};
  REQUIRE_THROWS_AS(pair_modalities(a, c), Error);
}
