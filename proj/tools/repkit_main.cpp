// repkit command-line interface: dataset synthesis, ingestion checks,
// segmentation export, training, prediction, evaluation and reporting.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "repkit/repkit.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string data_root;
  std::string output_dir;
  std::string exercise;
  std::vector<std::string> modalities;
  std::vector<std::string> imu_locations;
  std::string strategy;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> num_kernels;
  std::optional<std::size_t> target_length;
  std::optional<unsigned> threads;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file; flags override its values");
  cmd->add_option("--data", flags.data_root, "data root (holds imu/ and video/ subdirectories)");
  cmd->add_option("--out", flags.output_dir, "output directory");
  cmd->add_option("--exercise", flags.exercise, "military_press or rowing");
  cmd->add_option("--modality", flags.modalities, "imu and/or video (repeatable)");
  cmd->add_option("--imu-locations", flags.imu_locations, "IMU device subset (LW RW LA RA Back)");
  cmd->add_option("--strategy", flags.strategy, "raw_rocket, handcrafted or auto");
  cmd->add_option("--seed", flags.seed, "split seed");
  cmd->add_option("--num-kernels", flags.num_kernels, "number of random kernels");
  cmd->add_option("--target-length", flags.target_length, "per-repetition resample length");
  cmd->add_option("--threads", flags.threads, "worker threads (0 = hardware)");
}

repkit::PipelineConfig resolve_config(const CommonFlags& flags) {
  repkit::PipelineConfig config;
  if (!flags.config_path.empty()) config = repkit::load_config(flags.config_path);
  if (const char* env = std::getenv("REPKIT_DATA_ROOT"); env && *env) config.data_root = env;
  if (!flags.data_root.empty()) config.data_root = flags.data_root;
  if (!flags.output_dir.empty()) config.output_dir = flags.output_dir;
  if (!flags.exercise.empty()) config.exercise = repkit::exercise_from_name(flags.exercise);
  if (!flags.modalities.empty()) {
    config.modalities.clear();
    for (const auto& m : flags.modalities)
      config.modalities.push_back(repkit::modality_from_name(m));
  }
  if (!flags.imu_locations.empty()) config.imu_locations = flags.imu_locations;
  if (!flags.strategy.empty())
    config.strategy = repkit::feature_strategy_from_name(flags.strategy);
  if (flags.seed) config.split_seed = *flags.seed;
  if (flags.num_kernels) config.rocket.num_kernels = *flags.num_kernels;
  if (flags.target_length) config.target_length = *flags.target_length;
  if (flags.threads) config.threads = *flags.threads;
  return config;
}

std::vector<repkit::RawRecording> ingest_modality(const repkit::PipelineConfig& config,
                                                  repkit::Modality m) {
  fs::path root(config.data_root);
  if (m == repkit::Modality::imu) return repkit::ingest_imu(root / "imu", config.exercise);
  return repkit::ingest_keypoints(root / "video", config.exercise,
                                  {repkit::body25_keypoint_names().begin(),
                                   repkit::body25_keypoint_names().end()});
}

int cmd_ingest(const CommonFlags& flags) {
  auto config = resolve_config(flags);
  config.validate();
  if (config.data_root.empty()) repkit::fail(repkit::errc::bad_config, "--data is required");
  for (auto m : config.modalities) {
    auto recordings = ingest_modality(config, m);
    std::size_t min_len = 0, max_len = 0;
    for (const auto& r : recordings) {
      std::size_t len = r.series.length();
      if (min_len == 0 || len < min_len) min_len = len;
      max_len = std::max(max_len, len);
    }
    std::cout << repkit::modality_name(m) << ": " << recordings.size() << " recordings, "
              << (recordings.empty() ? 0 : recordings.front().series.num_channels())
              << " channels, length " << min_len << ".." << max_len << "\n";
  }
  return 0;
}

int cmd_segment(const CommonFlags& flags, const std::string& samples_out) {
  auto config = resolve_config(flags);
  config.validate();
  if (config.data_root.empty()) repkit::fail(repkit::errc::bad_config, "--data is required");
  std::ofstream out(samples_out);
  if (!out) repkit::fail(repkit::errc::io_error, "cannot open '" + samples_out + "'");
  std::size_t total = 0;
  for (auto m : config.modalities) {
    auto recordings = ingest_modality(config, m);
    repkit::Dataset ds = repkit::prepare_dataset(recordings, config, m);
    for (const auto& s : ds.samples) {
      nlohmann::json j;
      j["participant"] = s.participant_id;
      j["label"] = s.label;
      j["modality"] = repkit::modality_name(s.modality);
      j["repetition_index"] = s.repetition_index;
      if (s.series.sample_rate_hz) j["sample_rate_hz"] = *s.series.sample_rate_hz;
      j["channel_names"] = s.series.channel_names;
      j["values"] = s.series.values;
      out << j.dump() << '\n';
      ++total;
    }
  }
  std::cout << "wrote " << total << " segmented samples to " << samples_out << "\n";
  return 0;
}

int cmd_train(const CommonFlags& flags) {
  auto config = resolve_config(flags);
  config.validate();
  if (config.data_root.empty()) repkit::fail(repkit::errc::bad_config, "--data is required");
  fs::create_directories(config.output_dir);
  for (auto m : config.modalities) {
    auto recordings = ingest_modality(config, m);
    repkit::Dataset ds = repkit::prepare_dataset(recordings, config, m);
    std::optional<repkit::KernelSet> kernels;
    repkit::FeatureMatrix features = repkit::build_features(ds, config, m, kernels);
    std::set<std::string> participants;
    for (const auto& s : ds.samples) participants.insert(s.participant_id);
    auto plan = repkit::make_splits({participants.begin(), participants.end()}, config.split_seed);
    if (kernels) {
      auto path = fs::path(config.output_dir) /
                  ("kernels_" + std::string(repkit::modality_name(m)) + ".json");
      repkit::write_file_atomic(path, repkit::kernel_set_to_json(*kernels).dump(1) + "\n");
      std::cout << "wrote " << path.string() << "\n";
    }
    for (std::size_t s = 0; s < plan.splits.size(); ++s) {
      repkit::LinearModel model =
          repkit::fit_split_classifier(ds, features, plan.splits[s], config);
      auto path = fs::path(config.output_dir) /
                  ("model_" + std::string(repkit::modality_name(m)) + "_split" +
                   std::to_string(s + 1) + ".json");
      repkit::write_file_atomic(path, repkit::model_to_json(model).dump(1) + "\n");
      std::cout << "wrote " << path.string() << "\n";
    }
  }
  return 0;
}

int cmd_predict(const CommonFlags& flags, const std::string& model_path,
                const std::string& kernels_path, const std::string& csv_out) {
  auto config = resolve_config(flags);
  config.validate();
  if (config.data_root.empty()) repkit::fail(repkit::errc::bad_config, "--data is required");
  if (config.modalities.size() != 1)
    repkit::fail(repkit::errc::bad_config, "predict wants exactly one --modality");
  repkit::Modality m = config.modalities.front();

  repkit::LinearModel model = repkit::load_model(model_path);
  auto recordings = ingest_modality(config, m);
  repkit::Dataset ds = repkit::prepare_dataset(recordings, config, m);

  std::optional<repkit::KernelSet> kernels;
  if (config.strategy == repkit::FeatureStrategy::raw_rocket) {
    if (kernels_path.empty())
      repkit::fail(repkit::errc::bad_config, "--kernels is required for raw_rocket");
    kernels = repkit::load_kernels(kernels_path);
  }
  repkit::FeatureMatrix features = repkit::build_features(ds, config, m, kernels);
  repkit::FeatureMatrix probs = repkit::predict_proba(model, features);

  std::vector<std::vector<std::string>> meta(3);
  for (const auto& s : ds.samples) {
    meta[0].push_back(s.participant_id);
    meta[1].push_back(s.label);
    meta[2].push_back(std::to_string(s.repetition_index));
  }
  repkit::write_csv(probs, csv_out, {"participant", "label", "repetition"}, meta);
  std::cout << "wrote " << probs.rows << " predictions to " << csv_out << "\n";
  return 0;
}

int cmd_evaluate(const CommonFlags& flags, bool force_ensemble) {
  auto config = resolve_config(flags);
  if (force_ensemble) config.modalities = {repkit::Modality::imu, repkit::Modality::video};
  config.validate();
  if (force_ensemble && config.modalities.size() != 2)
    repkit::fail(repkit::errc::bad_config, "ensemble needs both modalities");
  repkit::PipelineResult result = repkit::run_pipeline(config);
  for (const auto& [source, report] : result.reports)
    std::cout << repkit::report_text_table(report) << "\n";
  for (const auto& f : result.written_files) std::cout << "wrote " << f << "\n";
  return 0;
}

int cmd_synth(const CommonFlags& flags, std::size_t participants, std::size_t reps, double noise,
              double dropout, bool complementary, bool imu_only, bool video_only) {
  auto config = resolve_config(flags);
  repkit::SynthSpec spec;
  spec.exercise = config.exercise;
  spec.num_participants = participants;
  spec.reps_per_recording = reps;
  spec.noise_sigma = noise;
  spec.keypoint_dropout_prob = dropout;
  spec.seed = flags.seed.value_or(1);
  if (config.has_modality(repkit::Modality::imu) && !flags.imu_locations.empty())
    spec.devices = config.imu_locations;
  if (complementary) {
    // Modality A separates {1,2} vs {3,4}; modality B the membership within
    // each pair. Neither alone identifies the class.
    std::size_t k = repkit::class_labels(spec.exercise).size();
    if (k != 4)
      repkit::fail(repkit::errc::bad_config, "--complementary needs a 4-class exercise");
    spec.imu_class_signals = {{2.0, 0.8, 0.0}, {2.0, 0.8, 0.0}, {5.0, 0.8, 0.0}, {5.0, 0.8, 0.0}};
    spec.video_class_signals = {{2.0, 0.8, 0.0}, {5.0, 0.8, 0.0}, {2.0, 0.8, 0.0}, {5.0, 0.8, 0.0}};
  }
  std::string out = config.output_dir.empty() ? "synth_data" : config.output_dir;
  repkit::synth_dataset(spec, out, !video_only, !imu_only);
  std::cout << "wrote synthetic dataset (" << participants << " participants, "
            << repkit::class_labels(spec.exercise).size() << " classes, " << reps
            << " reps) under " << out << "\n";
  return 0;
}

int cmd_report(const std::string& in_path) {
  std::ifstream in(in_path);
  if (!in) repkit::fail(repkit::errc::io_error, "cannot open '" + in_path + "'");
  nlohmann::json j;
  in >> j;
  std::cout << repkit::report_text_table(repkit::report_from_json(j));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"repkit: exercise repetition classification from IMU and pose time series"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string samples_out = "samples.jsonl";
  std::string model_path, kernels_path, csv_out = "predictions.csv", report_in;
  std::size_t synth_participants = 40, synth_reps = 10;
  double synth_noise = 0.05, synth_dropout = 0.0;
  bool complementary = false, imu_only = false, video_only = false;

  auto* ingest = app.add_subcommand("ingest", "parse and validate raw recordings");
  add_common_flags(ingest, flags);

  auto* segment = app.add_subcommand("segment", "export segmented, resampled samples as JSONL");
  add_common_flags(segment, flags);
  segment->add_option("--samples-out", samples_out, "output JSONL path");

  auto* train = app.add_subcommand("train", "fit classifiers for all three splits");
  add_common_flags(train, flags);

  auto* predict = app.add_subcommand("predict", "apply a saved model to a data root");
  add_common_flags(predict, flags);
  predict->add_option("--model", model_path, "model JSON file")->required();
  predict->add_option("--kernels", kernels_path, "kernel set JSON (raw_rocket only)");
  predict->add_option("--csv-out", csv_out, "predictions CSV path");

  auto* evaluate = app.add_subcommand("evaluate", "run the full pipeline and report accuracy");
  add_common_flags(evaluate, flags);

  auto* ensemble = app.add_subcommand("ensemble", "evaluate both modalities plus their fusion");
  add_common_flags(ensemble, flags);

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset on disk");
  add_common_flags(synth, flags);
  synth->add_option("--participants", synth_participants, "number of participants");
  synth->add_option("--reps", synth_reps, "repetitions per recording");
  synth->add_option("--noise", synth_noise, "noise sigma");
  synth->add_option("--dropout", synth_dropout, "keypoint dropout probability");
  synth->add_flag("--complementary", complementary, "pairwise-complementary modality signals");
  synth->add_flag("--imu-only", imu_only, "write only IMU files");
  synth->add_flag("--video-only", video_only, "write only keypoint files");

  auto* report = app.add_subcommand("report", "render a report JSON as a text table");
  report->add_option("--in", report_in, "report JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (ingest->parsed()) return cmd_ingest(flags);
    if (segment->parsed()) return cmd_segment(flags, samples_out);
    if (train->parsed()) return cmd_train(flags);
    if (predict->parsed()) return cmd_predict(flags, model_path, kernels_path, csv_out);
    if (evaluate->parsed()) return cmd_evaluate(flags, false);
    if (ensemble->parsed()) return cmd_evaluate(flags, true);
    if (synth->parsed())
      return cmd_synth(flags, synth_participants, synth_reps, synth_noise, synth_dropout,
                       complementary, imu_only, video_only);
    if (report->parsed()) return cmd_report(report_in);
  } catch (const repkit::Error& e) {
    std::cerr << "[" << stage << "] " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "[" << stage << "] unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
