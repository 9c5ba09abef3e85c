#pragma once

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "repkit/config.hpp"
#include "repkit/error.hpp"
#include "repkit/evaluation.hpp"
#include "repkit/features.hpp"
#include "repkit/ingest.hpp"
#include "repkit/linear_model.hpp"
#include "repkit/matrix.hpp"
#include "repkit/rocket.hpp"
#include "repkit/segmentation.hpp"
#include "repkit/series.hpp"

namespace repkit {

/// Writes `content` atomically (temp file in the same directory, then rename).
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) fail(errc::io_error, "cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out) fail(errc::io_error, "failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

/// Channel subset for the active configuration: IMU recordings keep the
/// configured device groups (segmentation already happened on the full set),
/// video recordings keep the configured keypoints.
inline MultivariateSeries select_channels(const MultivariateSeries& series,
                                          const PipelineConfig& config, Modality modality) {
  std::vector<std::string> wanted;
  if (modality == Modality::imu) {
    for (const auto& dev : imu_device_order()) {
      if (std::find(config.imu_locations.begin(), config.imu_locations.end(), dev) ==
          config.imu_locations.end())
        continue;
      for (const auto& sensor : imu_sensor_channels()) wanted.push_back(dev + "_" + sensor);
    }
  } else {
    for (const auto& kp : config.video_keypoint_names()) {
      wanted.push_back(kp + "_x");
      wanted.push_back(kp + "_y");
    }
  }
  MultivariateSeries out;
  out.sample_rate_hz = series.sample_rate_hz;
  for (const auto& name : wanted) {
    auto idx = series.channel_index(name);
    if (!idx) fail(errc::missing_channel, "configured channel '" + name + "' not in recording");
    out.channel_names.push_back(name);
    out.values.push_back(series.values[*idx]);
  }
  return out;
}

/// Segment every recording on its anchor channel, resample each repetition to
/// the target length and keep the configured channel subset. Repetition
/// indices count from 0 within each recording.
inline Dataset prepare_dataset(const std::vector<RawRecording>& recordings,
                               const PipelineConfig& config, Modality modality) {
  Dataset ds;
  ds.exercise = config.exercise;
  ds.target_length = config.target_length;
  SegmentationConfig seg = config.segmentation.for_modality(modality);
  for (const auto& rec : recordings) {
    auto [boundaries, segments] = segment_repetitions(rec.series, seg);
    for (std::size_t r = 0; r < segments.size(); ++r) {
      LabeledSample sample;
      sample.series = resample_linear(select_channels(segments[r], config, modality),
                                      config.target_length);
      sample.label = rec.label;
      sample.participant_id = rec.participant_id;
      sample.modality = modality;
      sample.repetition_index = r;
      ds.samples.push_back(std::move(sample));
    }
  }
  return ds;
}

/// Feature matrix for the configured strategy. For raw_rocket the kernels are
/// generated (or reused) per modality and the per-modality normalization flag
/// is applied to the series first; tabular strategies normalize inside
/// featurize_dataset.
inline FeatureMatrix build_features(const Dataset& dataset, const PipelineConfig& config,
                                    Modality modality, std::optional<KernelSet>& kernels) {
  bool normalize = config.normalize_for(modality);
  if (config.strategy == FeatureStrategy::raw_rocket) {
    Dataset working;
    const Dataset* source = &dataset;
    if (normalize) {
      working.exercise = dataset.exercise;
      working.target_length = dataset.target_length;
      working.samples = dataset.samples;
      for (auto& s : working.samples) s.series = znormalize(s.series);
      source = &working;
    }
    if (source->samples.empty()) fail(errc::shape_mismatch, "empty dataset");
    if (!kernels) {
      std::uint64_t seed = SplitMix64::substream_seed(config.rocket.kernel_seed,
                                                      modality == Modality::imu ? 0 : 1);
      kernels = generate_kernels(config.rocket.num_kernels,
                                 source->samples.front().series.num_channels(),
                                 config.target_length, seed);
    }
    return rocket_transform(*source, *kernels, config.threads);
  }
  kernels.reset();
  return featurize_dataset(dataset, config.strategy, normalize, config.threads);
}

namespace detail {

inline FeatureMatrix take_rows(const FeatureMatrix& m, const std::vector<std::size_t>& rows) {
  FeatureMatrix out(rows.size(), m.cols);
  out.column_names = m.column_names;
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(m.row(rows[i]), m.row(rows[i]) + m.cols, out.row(i));
  return out;
}

inline std::vector<std::size_t> rows_for(const Dataset& ds,
                                         const std::vector<std::string>& participants) {
  std::set<std::string> wanted(participants.begin(), participants.end());
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    if (wanted.count(ds.samples[i].participant_id)) rows.push_back(i);
  return rows;
}

inline std::vector<std::string> labels_for(const Dataset& ds,
                                           const std::vector<std::size_t>& rows) {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(ds.samples[r].label);
  return out;
}

}  // namespace detail

/// Fits the configured classifier on the training rows of one split. For
/// ridge the alpha is chosen on the inner validation participants and the
/// model is refit on train+validation; for logistic the optional L1 selection
/// mask is computed on the training features first.
inline LinearModel fit_split_classifier(const Dataset& ds, const FeatureMatrix& features,
                                        const Split& split, const PipelineConfig& config) {
  auto train_rows = detail::rows_for(ds, split.train_participants);
  auto val_rows = detail::rows_for(ds, split.validation_participants);
  std::vector<std::size_t> full_rows = train_rows;
  full_rows.insert(full_rows.end(), val_rows.begin(), val_rows.end());
  std::sort(full_rows.begin(), full_rows.end());

  FeatureMatrix X_full = detail::take_rows(features, full_rows);
  auto y_full = detail::labels_for(ds, full_rows);

  LogisticOptions opts;
  opts.max_iterations = config.classifier.max_iterations;
  opts.tolerance = config.classifier.tolerance;

  LinearModel model;
  if (config.classifier.kind == "ridge") {
    double best_alpha = config.classifier.ridge_alphas.front();
    if (config.classifier.ridge_alphas.size() > 1 && !val_rows.empty()) {
      FeatureMatrix X_train = detail::take_rows(features, train_rows);
      auto y_train = detail::labels_for(ds, train_rows);
      FeatureMatrix X_val = detail::take_rows(features, val_rows);
      auto y_val = detail::labels_for(ds, val_rows);
      double best_acc = -1.0;
      for (double alpha : config.classifier.ridge_alphas) {
        LinearModel candidate = fit_ridge(X_train, y_train, alpha, {}, config.threads);
        auto pred = predict_labels(candidate, X_val);
        std::size_t hits = 0;
        for (std::size_t i = 0; i < pred.size(); ++i)
          if (pred[i] == y_val[i]) ++hits;
        double acc = static_cast<double>(hits) / static_cast<double>(pred.size());
        if (acc > best_acc) {
          best_acc = acc;
          best_alpha = alpha;
        }
      }
    }
    model = fit_ridge(X_full, y_full, best_alpha, {}, config.threads);
  } else {
    PenaltyKind penalty =
        config.classifier.logistic_penalty == "l1" ? PenaltyKind::l1 : PenaltyKind::l2;
    std::optional<std::vector<bool>> mask;
    if (config.classifier.l1_selection) {
      StandardScaler scaler;
      scaler.fit(X_full);
      Eigen::MatrixXd Xs = repkit::detail::standardized_kept(X_full, scaler, {});
      FeatureMatrix standardized(X_full.rows, X_full.cols);
      for (std::size_t r = 0; r < X_full.rows; ++r)
        for (std::size_t c = 0; c < X_full.cols; ++c)
          standardized.at(r, c) = Xs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      mask = select_features_l1(standardized, y_full, config.classifier.l1_selection_c, opts);
      std::size_t kept = 0;
      for (bool b : *mask) kept += b ? 1 : 0;
      if (kept == 0) mask.reset();  // selection dropped everything; keep all
    }
    model = fit_logistic(X_full, y_full, config.classifier.logistic_c, penalty, opts, mask);
  }
  model.seed = split.seed;
  return model;
}

struct PipelineResult {
  std::map<std::string, EvaluationReport> reports;  // by source: imu / video / ensemble
  std::vector<std::string> written_files;
};

/// End-to-end run: ingest -> segment -> resample -> (normalize) ->
/// featurize/transform -> fit -> predict -> (ensemble) -> evaluate over all
/// three participant-grouped splits. Deterministic given the configured
/// seeds; writes reports, models and kernel sets under output_dir.
inline PipelineResult run_pipeline(const PipelineConfig& config, bool write_artifacts = true) {
  config.validate();
  if (config.data_root.empty()) fail(errc::bad_config, "data_root is required");
  std::filesystem::path root(config.data_root);
  std::string fingerprint = config_fingerprint(config);

  struct ModalityState {
    Modality modality;
    Dataset dataset;
    FeatureMatrix features;
    std::optional<KernelSet> kernels;
    std::vector<FeatureMatrix> split_probs;          // test probabilities per split
    std::vector<std::vector<std::size_t>> test_rows;  // per split
    std::vector<LinearModel> models;
    EvaluationReport report;
  };

  std::vector<ModalityState> states;
  std::set<std::string> participants;
  for (Modality m : config.modalities) {
    ModalityState state;
    state.modality = m;
    std::vector<RawRecording> recordings;
    if (m == Modality::imu) {
      recordings = ingest_imu(root / "imu", config.exercise);
    } else {
      recordings = ingest_keypoints(root / "video", config.exercise,
                                    {body25_keypoint_names().begin(),
                                     body25_keypoint_names().end()});
    }
    if (recordings.empty())
      fail(errc::io_error, std::string("no ") + modality_name(m) + " recordings under '" +
                               root.string() + "'");
    state.dataset = prepare_dataset(recordings, config, m);
    for (const auto& s : state.dataset.samples) participants.insert(s.participant_id);
    state.features = build_features(state.dataset, config, m, state.kernels);
    states.push_back(std::move(state));
  }

  SplitPlan plan = make_splits({participants.begin(), participants.end()}, config.split_seed);

  for (auto& state : states) {
    state.report.source = modality_name(state.modality);
    state.report.exercise = exercise_name(config.exercise);
    state.report.classes = class_labels(config.exercise);
    state.report.config_fingerprint = fingerprint;
    for (const auto& split : plan.splits) {
      LinearModel model = fit_split_classifier(state.dataset, state.features, split, config);
      auto test_rows = detail::rows_for(state.dataset, split.test_participants);
      FeatureMatrix X_test = detail::take_rows(state.features, test_rows);
      FeatureMatrix probs = predict_proba(model, X_test);
      std::vector<std::string> pred;
      pred.reserve(probs.rows);
      for (std::size_t r = 0; r < probs.rows; ++r) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < probs.cols; ++c)
          if (probs.at(r, c) > probs.at(r, best)) best = c;
        pred.push_back(probs.column_names[best]);
      }
      state.report.splits.push_back(
          evaluate(pred, detail::labels_for(state.dataset, test_rows), state.report.classes));
      state.split_probs.push_back(std::move(probs));
      state.test_rows.push_back(std::move(test_rows));
      state.models.push_back(std::move(model));
    }
    state.report.finalize();
  }

  PipelineResult result;
  for (auto& state : states) result.reports[state.report.source] = state.report;

  if (states.size() == 2) {
    EvaluationReport ensemble_report;
    ensemble_report.source = "ensemble";
    ensemble_report.exercise = exercise_name(config.exercise);
    ensemble_report.classes = class_labels(config.exercise);
    ensemble_report.config_fingerprint = fingerprint;
    for (std::size_t s = 0; s < plan.splits.size(); ++s) {
      std::vector<LabeledSample> test_a, test_b;
      for (auto r : states[0].test_rows[s]) test_a.push_back(states[0].dataset.samples[r]);
      for (auto r : states[1].test_rows[s]) test_b.push_back(states[1].dataset.samples[r]);
      PairedSamples paired = pair_modalities(test_a, test_b);

      FeatureMatrix probs_a(paired.pairs.size(), states[0].split_probs[s].cols);
      FeatureMatrix probs_b(paired.pairs.size(), states[1].split_probs[s].cols);
      probs_a.column_names = states[0].split_probs[s].column_names;
      probs_b.column_names = states[1].split_probs[s].column_names;
      std::vector<std::string> truth;
      for (std::size_t i = 0; i < paired.pairs.size(); ++i) {
        auto [ia, ib] = paired.pairs[i];
        std::copy(states[0].split_probs[s].row(ia), states[0].split_probs[s].row(ia) + probs_a.cols,
                  probs_a.row(i));
        std::copy(states[1].split_probs[s].row(ib), states[1].split_probs[s].row(ib) + probs_b.cols,
                  probs_b.row(i));
        truth.push_back(test_a[paired.pairs[i].first].label);
      }
      auto [mean_probs, labels] = ensemble_predict({probs_a, probs_b});
      ensemble_report.splits.push_back(evaluate(labels, truth, ensemble_report.classes));
    }
    ensemble_report.finalize();
    result.reports["ensemble"] = std::move(ensemble_report);
  }

  if (write_artifacts) {
    std::filesystem::path out_dir(config.output_dir);
    std::filesystem::create_directories(out_dir);
    for (const auto& [source, report] : result.reports) {
      auto path = out_dir / ("report_" + source + ".json");
      write_file_atomic(path, report_to_json(report).dump(1) + "\n");
      result.written_files.push_back(path.string());
    }
    for (const auto& state : states) {
      std::string m = modality_name(state.modality);
      if (state.kernels) {
        auto path = out_dir / ("kernels_" + m + ".json");
        write_file_atomic(path, kernel_set_to_json(*state.kernels).dump(1) + "\n");
        result.written_files.push_back(path.string());
      }
      for (std::size_t s = 0; s < state.models.size(); ++s) {
        auto path = out_dir / ("model_" + m + "_split" + std::to_string(s + 1) + ".json");
        write_file_atomic(path, model_to_json(state.models[s]).dump(1) + "\n");
        result.written_files.push_back(path.string());
      }
    }
  }
  return result;
}

}  // namespace repkit
