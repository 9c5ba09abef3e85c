#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "repkit/error.hpp"
#include "repkit/matrix.hpp"
#include "repkit/rng.hpp"
#include "repkit/series.hpp"

namespace repkit {

/// Participant-grouped membership for one train/validation/test split.
struct Split {
  std::vector<std::string> train_participants;
  std::vector<std::string> validation_participants;
  std::vector<std::string> test_participants;
  std::uint64_t seed = 0;
};

/// Three grouped 70/30 splits with an inner 85/15 validation carve-out.
/// Assignment depends only on participant identifiers; the validation set is
/// merged back into training before the final fit (it exists for
/// hyperparameter selection only).
struct SplitPlan {
  std::array<Split, 3> splits;
};

inline SplitPlan make_splits(const std::vector<std::string>& participants, std::uint64_t seed) {
  std::set<std::string> unique(participants.begin(), participants.end());
  std::vector<std::string> ids(unique.begin(), unique.end());
  if (ids.size() < 10)
    fail(errc::too_few_participants,
         "need at least 10 participants, got " + std::to_string(ids.size()));

  auto round_half_up = [](double v) { return static_cast<std::size_t>(std::floor(v + 0.5)); };
  std::size_t n = ids.size();
  std::size_t n_test = round_half_up(0.30 * static_cast<double>(n));

  SplitPlan plan;
  for (std::size_t s = 0; s < 3; ++s) {
    std::vector<std::string> shuffled = ids;
    SplitMix64 rng(SplitMix64::substream_seed(seed, s));
    for (std::size_t i = n - 1; i > 0; --i) {
      std::size_t j = rng.next_below(i + 1);
      std::swap(shuffled[i], shuffled[j]);
    }
    Split& split = plan.splits[s];
    split.seed = SplitMix64::substream_seed(seed, s);
    split.test_participants.assign(shuffled.begin(),
                                   shuffled.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::size_t n_rest = n - n_test;
    std::size_t n_val = round_half_up(0.15 * static_cast<double>(n_rest));
    split.validation_participants.assign(
        shuffled.begin() + static_cast<std::ptrdiff_t>(n_test),
        shuffled.begin() + static_cast<std::ptrdiff_t>(n_test + n_val));
    split.train_participants.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_test + n_val),
                                    shuffled.end());
    std::sort(split.test_participants.begin(), split.test_participants.end());
    std::sort(split.validation_participants.begin(), split.validation_participants.end());
    std::sort(split.train_participants.begin(), split.train_participants.end());
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

struct SplitResult {
  double accuracy = 0.0;
  std::vector<std::vector<std::size_t>> confusion;  // [truth][predicted]
  std::vector<double> precision;                    // per class
  std::vector<double> recall;
  std::vector<std::size_t> support;  // test samples per true class
  std::size_t total = 0;
};

/// Accuracy, per-class precision/recall and the K x K confusion matrix
/// (rows = truth) for one prediction run.
inline SplitResult evaluate(const std::vector<std::string>& predictions,
                            const std::vector<std::string>& truth,
                            const std::vector<std::string>& classes) {
  if (predictions.size() != truth.size())
    fail(errc::dimension_mismatch, "predictions and truth differ in length");
  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < classes.size(); ++k) index[classes[k]] = k;

  SplitResult r;
  std::size_t K = classes.size();
  r.confusion.assign(K, std::vector<std::size_t>(K, 0));
  r.total = truth.size();
  for (std::size_t i = 0; i < truth.size(); ++i) {
    auto t = index.find(truth[i]);
    auto p = index.find(predictions[i]);
    if (t == index.end()) fail(errc::unknown_label, "true label '" + truth[i] + "' not in class list");
    if (p == index.end())
      fail(errc::unknown_label, "predicted label '" + predictions[i] + "' not in class list");
    ++r.confusion[t->second][p->second];
  }
  std::size_t correct = 0;
  r.precision.assign(K, 0.0);
  r.recall.assign(K, 0.0);
  r.support.assign(K, 0);
  for (std::size_t k = 0; k < K; ++k) {
    correct += r.confusion[k][k];
    std::size_t row = 0, col = 0;
    for (std::size_t j = 0; j < K; ++j) {
      row += r.confusion[k][j];
      col += r.confusion[j][k];
    }
    r.support[k] = row;
    r.recall[k] = row ? static_cast<double>(r.confusion[k][k]) / static_cast<double>(row) : 0.0;
    r.precision[k] = col ? static_cast<double>(r.confusion[k][k]) / static_cast<double>(col) : 0.0;
  }
  r.accuracy = r.total ? static_cast<double>(correct) / static_cast<double>(r.total) : 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Ensembling
// ---------------------------------------------------------------------------

/// Element-wise mean of per-model probability matrices plus argmax labels
/// (ties to the lowest class index). All matrices must share shape and class
/// order; column names are taken as the class list.
inline std::pair<FeatureMatrix, std::vector<std::string>> ensemble_predict(
    const std::vector<FeatureMatrix>& probabilities) {
  if (probabilities.empty()) fail(errc::shape_mismatch, "no probability matrices to ensemble");
  const FeatureMatrix& first = probabilities.front();
  for (const auto& m : probabilities) {
    if (m.rows != first.rows || m.cols != first.cols)
      fail(errc::shape_mismatch, "probability matrices disagree on shape");
    if (m.column_names != first.column_names)
      fail(errc::shape_mismatch, "probability matrices disagree on class order");
  }

  FeatureMatrix mean(first.rows, first.cols);
  mean.column_names = first.column_names;
  for (const auto& m : probabilities)
    for (std::size_t i = 0; i < m.data.size(); ++i) mean.data[i] += m.data[i];
  double inv = 1.0 / static_cast<double>(probabilities.size());
  for (auto& v : mean.data) v *= inv;

  std::vector<std::string> labels;
  labels.reserve(mean.rows);
  for (std::size_t r = 0; r < mean.rows; ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < mean.cols; ++c)
      if (mean.at(r, c) > mean.at(r, best)) best = c;
    labels.push_back(mean.column_names[best]);
  }
  return {std::move(mean), std::move(labels)};
}

/// Deterministic join of two modalities' samples on the key
/// (participant, label, repetition_index). Unmatched repetitions are dropped
/// and counted; an empty intersection is an error.
struct PairedSamples {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (index in a, index in b)
  std::size_t dropped_a = 0;
  std::size_t dropped_b = 0;
};

inline PairedSamples pair_modalities(const std::vector<LabeledSample>& a,
                                     const std::vector<LabeledSample>& b) {
  auto key = [](const LabeledSample& s) {
    return s.participant_id + '\x1f' + s.label + '\x1f' + std::to_string(s.repetition_index);
  };
  std::map<std::string, std::size_t> index_b;
  for (std::size_t i = 0; i < b.size(); ++i) index_b[key(b[i])] = i;

  std::map<std::string, std::pair<std::size_t, std::size_t>> matched;
  std::size_t dropped_a = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto it = index_b.find(key(a[i]));
    if (it == index_b.end()) {
      ++dropped_a;
      continue;
    }
    matched[it->first] = {i, it->second};
  }
  PairedSamples out;
  out.dropped_a = dropped_a;
  out.dropped_b = b.size() - matched.size();
  for (const auto& [k, pair] : matched) out.pairs.push_back(pair);
  if (out.pairs.empty())
    fail(errc::empty_intersection, "modalities share no (participant, class, repetition) keys");
  if (out.dropped_a || out.dropped_b)
    std::cerr << "[ensemble] warning: dropped " << out.dropped_a << "+" << out.dropped_b
              << " unmatched repetitions while pairing modalities\n";
  return out;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline constexpr int kReportFormatVersion = 1;

/// Aggregated evaluation across the three splits for one source
/// ("imu", "video" or "ensemble").
struct EvaluationReport {
  std::string source;
  std::string exercise;
  std::vector<std::string> classes;
  std::vector<SplitResult> splits;
  double mean_accuracy = 0.0;
  std::string config_fingerprint;

  void finalize() {
    double sum = 0.0;
    for (const auto& s : splits) sum += s.accuracy;
    mean_accuracy = splits.empty() ? 0.0 : sum / static_cast<double>(splits.size());
  }
};

inline nlohmann::json report_to_json(const EvaluationReport& report) {
  nlohmann::json j;
  j["format_version"] = kReportFormatVersion;
  j["type"] = "repkit.evaluation_report";
  j["source"] = report.source;
  j["exercise"] = report.exercise;
  j["classes"] = report.classes;
  j["config_fingerprint"] = report.config_fingerprint;
  j["mean_accuracy"] = report.mean_accuracy;
  nlohmann::json splits = nlohmann::json::array();
  for (const auto& s : report.splits) {
    splits.push_back({{"accuracy", s.accuracy},
                      {"confusion", s.confusion},
                      {"precision", s.precision},
                      {"recall", s.recall},
                      {"support", s.support},
                      {"total", s.total}});
  }
  j["splits"] = std::move(splits);
  return j;
}

inline EvaluationReport report_from_json(const nlohmann::json& j) {
  if (!j.contains("type") || j["type"] != "repkit.evaluation_report")
    fail(errc::malformed_input, "not an evaluation report artifact");
  EvaluationReport r;
  r.source = j["source"].get<std::string>();
  r.exercise = j["exercise"].get<std::string>();
  r.classes = j["classes"].get<std::vector<std::string>>();
  r.config_fingerprint = j["config_fingerprint"].get<std::string>();
  r.mean_accuracy = j["mean_accuracy"].get<double>();
  for (const auto& js : j["splits"]) {
    SplitResult s;
    s.accuracy = js["accuracy"].get<double>();
    s.confusion = js["confusion"].get<std::vector<std::vector<std::size_t>>>();
    s.precision = js["precision"].get<std::vector<double>>();
    s.recall = js["recall"].get<std::vector<double>>();
    s.support = js["support"].get<std::vector<std::size_t>>();
    s.total = js["total"].get<std::size_t>();
    r.splits.push_back(std::move(s));
  }
  return r;
}

/// Human-readable table: per-split accuracy, the mean, and per-class
/// precision/recall/support aggregated over splits.
inline std::string report_text_table(const EvaluationReport& report) {
  std::ostringstream os;
  os << "source: " << report.source << "   exercise: " << report.exercise
     << "   config: " << report.config_fingerprint << "\n";
  os << std::fixed << std::setprecision(4);
  for (std::size_t s = 0; s < report.splits.size(); ++s)
    os << "  split " << s + 1 << " accuracy: " << report.splits[s].accuracy
       << "  (n=" << report.splits[s].total << ")\n";
  os << "  mean accuracy: " << report.mean_accuracy << "\n\n";

  std::size_t K = report.classes.size();
  std::vector<std::size_t> support(K, 0);
  std::vector<std::vector<std::size_t>> confusion(K, std::vector<std::size_t>(K, 0));
  for (const auto& s : report.splits)
    for (std::size_t i = 0; i < K; ++i) {
      support[i] += s.support[i];
      for (std::size_t j = 0; j < K; ++j) confusion[i][j] += s.confusion[i][j];
    }

  os << "  " << std::left << std::setw(8) << "class" << std::right << std::setw(10)
     << "precision" << std::setw(8) << "recall" << std::setw(9) << "support" << "\n";
  for (std::size_t k = 0; k < K; ++k) {
    std::size_t col = 0, row = support[k];
    for (std::size_t j = 0; j < K; ++j) col += confusion[j][k];
    double prec = col ? static_cast<double>(confusion[k][k]) / static_cast<double>(col) : 0.0;
    double rec = row ? static_cast<double>(confusion[k][k]) / static_cast<double>(row) : 0.0;
    os << "  " << std::left << std::setw(8) << report.classes[k] << std::right << std::setw(10)
       << prec << std::setw(8) << rec << std::setw(9) << support[k] << "\n";
  }

  os << "\n  confusion (rows = truth):\n";
  os << "  " << std::setw(8) << " ";
  for (const auto& c : report.classes) os << std::setw(7) << c;
  os << "\n";
  for (std::size_t i = 0; i < K; ++i) {
    os << "  " << std::left << std::setw(8) << report.classes[i] << std::right;
    for (std::size_t j = 0; j < K; ++j) os << std::setw(7) << confusion[i][j];
    os << "\n";
  }
  return os.str();
}

}  // namespace repkit
