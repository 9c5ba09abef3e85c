#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "repkit/error.hpp"
#include "repkit/features.hpp"
#include "repkit/ingest.hpp"
#include "repkit/segmentation.hpp"
#include "repkit/series.hpp"

namespace repkit {

struct SegmentationSettings {
  std::size_t expected_reps = 10;
  double min_separation_fraction = 0.5;
  double prominence_fraction = 0.25;
  std::size_t smoothing_window = 11;
  std::string imu_anchor = "RA_mag_y";
  std::string video_anchor = "LWrist_y";

  SegmentationConfig for_modality(Modality m) const {
    SegmentationConfig c;
    c.anchor_channel = m == Modality::imu ? imu_anchor : video_anchor;
    c.expected_reps = expected_reps;
    c.min_separation_fraction = min_separation_fraction;
    c.prominence_fraction = prominence_fraction;
    c.smoothing_window = smoothing_window;
    return c;
  }
};

struct RocketSettings {
  std::size_t num_kernels = 10000;
  std::uint64_t kernel_seed = 7;
};

struct ClassifierSettings {
  std::string kind = "ridge";  // "ridge" or "logistic"
  std::vector<double> ridge_alphas = {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0};
  double logistic_c = 0.01;
  std::string logistic_penalty = "l2";
  bool l1_selection = true;  // tabular strategies only
  double l1_selection_c = 0.01;
  std::size_t max_iterations = 10000;
  double tolerance = 1e-6;
};

/// Full pipeline configuration. File values are overridden by CLI flags; the
/// REPKIT_DATA_ROOT environment variable overrides data_root from the file.
struct PipelineConfig {
  Exercise exercise = Exercise::military_press;
  std::vector<Modality> modalities = {Modality::imu};
  std::vector<std::string> imu_locations = {imu_device_order().begin(), imu_device_order().end()};
  std::string video_keypoints = "upper8";  // "upper8" or "all25"
  FeatureStrategy strategy = FeatureStrategy::raw_rocket;
  bool normalize_imu = true;
  bool normalize_video = false;
  std::size_t target_length = 161;
  SegmentationSettings segmentation;
  RocketSettings rocket;
  ClassifierSettings classifier;
  std::uint64_t split_seed = 42;
  std::string data_root;
  std::string output_dir = "out";
  unsigned threads = 0;  // 0 = hardware concurrency

  bool has_modality(Modality m) const {
    for (auto x : modalities)
      if (x == m) return true;
    return false;
  }

  bool normalize_for(Modality m) const {
    return m == Modality::imu ? normalize_imu : normalize_video;
  }

  std::vector<std::string> video_keypoint_names() const {
    if (video_keypoints == "upper8")
      return {upper_body8_keypoint_names().begin(), upper_body8_keypoint_names().end()};
    if (video_keypoints == "all25")
      return {body25_keypoint_names().begin(), body25_keypoint_names().end()};
    fail(errc::bad_config, "video_keypoints must be 'upper8' or 'all25'");
  }

  void validate() const {
    if (modalities.empty()) fail(errc::bad_config, "at least one modality is required");
    if (has_modality(Modality::imu) && imu_locations.empty())
      fail(errc::bad_config, "imu_locations must not be empty when the IMU modality is active");
    for (const auto& loc : imu_locations)
      if (std::find(imu_device_order().begin(), imu_device_order().end(), loc) ==
          imu_device_order().end())
        fail(errc::bad_config, "unknown IMU location '" + loc + "'");
    (void)video_keypoint_names();
    if (target_length < 2) fail(errc::bad_config, "target_length must be >= 2");
    if (classifier.kind != "ridge" && classifier.kind != "logistic")
      fail(errc::bad_config, "classifier.kind must be 'ridge' or 'logistic'");
    if (classifier.kind == "ridge" && classifier.ridge_alphas.empty())
      fail(errc::bad_config, "ridge_alphas must not be empty");
    segmentation.for_modality(Modality::imu).validate();
  }
};

inline nlohmann::json config_to_json(const PipelineConfig& c) {
  nlohmann::json j;
  j["exercise"] = exercise_name(c.exercise);
  std::vector<std::string> mods;
  for (auto m : c.modalities) mods.emplace_back(modality_name(m));
  j["modalities"] = mods;
  j["imu_locations"] = c.imu_locations;
  j["video_keypoints"] = c.video_keypoints;
  j["strategy"] = feature_strategy_name(c.strategy);
  j["normalize_imu"] = c.normalize_imu;
  j["normalize_video"] = c.normalize_video;
  j["target_length"] = c.target_length;
  j["segmentation"] = {{"expected_reps", c.segmentation.expected_reps},
                       {"min_separation_fraction", c.segmentation.min_separation_fraction},
                       {"prominence_fraction", c.segmentation.prominence_fraction},
                       {"smoothing_window", c.segmentation.smoothing_window},
                       {"imu_anchor", c.segmentation.imu_anchor},
                       {"video_anchor", c.segmentation.video_anchor}};
  j["rocket"] = {{"num_kernels", c.rocket.num_kernels}, {"kernel_seed", c.rocket.kernel_seed}};
  j["classifier"] = {{"kind", c.classifier.kind},
                     {"ridge_alphas", c.classifier.ridge_alphas},
                     {"logistic_c", c.classifier.logistic_c},
                     {"logistic_penalty", c.classifier.logistic_penalty},
                     {"l1_selection", c.classifier.l1_selection},
                     {"l1_selection_c", c.classifier.l1_selection_c},
                     {"max_iterations", c.classifier.max_iterations},
                     {"tolerance", c.classifier.tolerance}};
  j["split_seed"] = c.split_seed;
  j["data_root"] = c.data_root;
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  return j;
}

inline PipelineConfig config_from_json(const nlohmann::json& j) {
  PipelineConfig c;
  try {
    if (j.contains("exercise")) c.exercise = exercise_from_name(j["exercise"].get<std::string>());
    if (j.contains("modalities")) {
      c.modalities.clear();
      for (const auto& m : j["modalities"])
        c.modalities.push_back(modality_from_name(m.get<std::string>()));
    }
    if (j.contains("imu_locations"))
      c.imu_locations = j["imu_locations"].get<std::vector<std::string>>();
    if (j.contains("video_keypoints")) c.video_keypoints = j["video_keypoints"].get<std::string>();
    if (j.contains("strategy"))
      c.strategy = feature_strategy_from_name(j["strategy"].get<std::string>());
    if (j.contains("normalize_imu")) c.normalize_imu = j["normalize_imu"].get<bool>();
    if (j.contains("normalize_video")) c.normalize_video = j["normalize_video"].get<bool>();
    if (j.contains("target_length")) c.target_length = j["target_length"].get<std::size_t>();
    if (j.contains("segmentation")) {
      const auto& js = j["segmentation"];
      if (js.contains("expected_reps"))
        c.segmentation.expected_reps = js["expected_reps"].get<std::size_t>();
      if (js.contains("min_separation_fraction"))
        c.segmentation.min_separation_fraction = js["min_separation_fraction"].get<double>();
      if (js.contains("prominence_fraction"))
        c.segmentation.prominence_fraction = js["prominence_fraction"].get<double>();
      if (js.contains("smoothing_window"))
        c.segmentation.smoothing_window = js["smoothing_window"].get<std::size_t>();
      if (js.contains("imu_anchor")) c.segmentation.imu_anchor = js["imu_anchor"].get<std::string>();
      if (js.contains("video_anchor"))
        c.segmentation.video_anchor = js["video_anchor"].get<std::string>();
    }
    if (j.contains("rocket")) {
      const auto& jr = j["rocket"];
      if (jr.contains("num_kernels")) c.rocket.num_kernels = jr["num_kernels"].get<std::size_t>();
      if (jr.contains("kernel_seed")) c.rocket.kernel_seed = jr["kernel_seed"].get<std::uint64_t>();
    }
    if (j.contains("classifier")) {
      const auto& jc = j["classifier"];
      if (jc.contains("kind")) c.classifier.kind = jc["kind"].get<std::string>();
      if (jc.contains("ridge_alphas"))
        c.classifier.ridge_alphas = jc["ridge_alphas"].get<std::vector<double>>();
      if (jc.contains("logistic_c")) c.classifier.logistic_c = jc["logistic_c"].get<double>();
      if (jc.contains("logistic_penalty"))
        c.classifier.logistic_penalty = jc["logistic_penalty"].get<std::string>();
      if (jc.contains("l1_selection")) c.classifier.l1_selection = jc["l1_selection"].get<bool>();
      if (jc.contains("l1_selection_c"))
        c.classifier.l1_selection_c = jc["l1_selection_c"].get<double>();
      if (jc.contains("max_iterations"))
        c.classifier.max_iterations = jc["max_iterations"].get<std::size_t>();
      if (jc.contains("tolerance")) c.classifier.tolerance = jc["tolerance"].get<double>();
    }
    if (j.contains("split_seed")) c.split_seed = j["split_seed"].get<std::uint64_t>();
    if (j.contains("data_root")) c.data_root = j["data_root"].get<std::string>();
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("threads")) c.threads = j["threads"].get<unsigned>();
  } catch (const nlohmann::json::exception& e) {
    fail(errc::bad_config, std::string("bad config value: ") + e.what());
  }
  return c;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::bad_config, "config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

/// FNV-1a hash of the canonical JSON dump; identifies a configuration in
/// reports and filenames.
inline std::string config_fingerprint(const PipelineConfig& c) {
  std::string dump = config_to_json(c).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace repkit
