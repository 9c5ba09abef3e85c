#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "repkit/error.hpp"
#include "repkit/series.hpp"

namespace repkit {

/// Devices in channel order (device-major layout).
inline const std::array<std::string, 5>& imu_device_order() {
  static const std::array<std::string, 5> order = {"LW", "RW", "LA", "RA", "Back"};
  return order;
}

inline const std::array<std::string, 9>& imu_sensor_channels() {
  static const std::array<std::string, 9> names = {"acc_x",  "acc_y",  "acc_z",
                                                   "gyro_x", "gyro_y", "gyro_z",
                                                   "mag_x",  "mag_y",  "mag_z"};
  return names;
}

inline const std::string& imu_csv_header() {
  static const std::string header =
      "timestamp,acc_x,acc_y,acc_z,gyro_x,gyro_y,gyro_z,mag_x,mag_y,mag_z";
  return header;
}

/// BODY-25 keypoint names in the pose estimator's output order.
inline const std::array<std::string, 25>& body25_keypoint_names() {
  static const std::array<std::string, 25> names = {
      "Nose",   "Neck",    "RShoulder", "RElbow",    "RWrist",    "LShoulder", "LElbow",
      "LWrist", "MidHip",  "RHip",      "RKnee",     "RAnkle",    "LHip",      "LKnee",
      "LAnkle", "REye",    "LEye",      "REar",      "LEar",      "LBigToe",   "LSmallToe",
      "LHeel",  "RBigToe", "RSmallToe", "RHeel"};
  return names;
}

/// The 8 upper-body keypoints used by default (nose, neck, both shoulders,
/// both elbows, both wrists).
inline const std::array<std::string, 8>& upper_body8_keypoint_names() {
  static const std::array<std::string, 8> names = {"Nose",   "Neck",   "RShoulder", "RElbow",
                                                   "RWrist", "LShoulder", "LElbow", "LWrist"};
  return names;
}

/// One full multi-repetition recording straight from disk.
struct RawRecording {
  std::string participant_id;
  Exercise exercise = Exercise::military_press;
  std::string label;
  Modality modality = Modality::imu;
  std::string source;
  MultivariateSeries series;
};

namespace detail {

inline bool parse_double(const std::string& tok, double& out) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end != begin && *end == '\0' && std::isfinite(out);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream is(line);
  while (std::getline(is, tok, ',')) out.push_back(tok);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct ImuFileName {
  std::string participant, label, device;
};

/// Filenames encode metadata as <participant>_<label>_<device>.csv; the
/// participant id must not contain underscores.
inline ImuFileName parse_imu_filename(const std::filesystem::path& path) {
  std::string stem = path.stem().string();
  std::vector<std::string> tokens;
  std::string tok;
  std::istringstream is(stem);
  while (std::getline(is, tok, '_')) tokens.push_back(tok);
  if (tokens.size() != 3)
    fail(errc::malformed_input,
         "IMU filename '" + path.filename().string() + "' is not <participant>_<label>_<device>.csv");
  return {tokens[0], tokens[1], tokens[2]};
}

}  // namespace detail

/// Reads every *.csv under `dir` (layout: one file per participant, class and
/// device, header `timestamp,acc_x,...,mag_z`) and merges the devices of each
/// (participant, class) pair into one recording with device-major channels
/// ("LW_acc_x", ..., "Back_mag_z"). Five devices give 45 channels. A missing
/// device is a warning; a malformed row is an error naming file and line.
inline std::vector<RawRecording> ingest_imu(const std::filesystem::path& dir, Exercise exercise) {
  if (!std::filesystem::is_directory(dir))
    fail(errc::io_error, "'" + dir.string() + "' is not a directory");
  const auto& classes = class_labels(exercise);
  const auto& devices = imu_device_order();

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());  // discovery order must not matter

  struct DeviceStream {
    std::vector<std::array<double, 9>> rows;
    double first_ts = 0.0, last_ts = 0.0;
    std::string source;
  };
  // (participant, label) -> device -> stream
  std::map<std::pair<std::string, std::string>, std::map<std::string, DeviceStream>> groups;

  for (const auto& path : files) {
    auto meta = detail::parse_imu_filename(path);
    if (std::find(classes.begin(), classes.end(), meta.label) == classes.end())
      fail(errc::unknown_label, "file '" + path.filename().string() + "' has class '" +
                                    meta.label + "' unknown to " + exercise_name(exercise));
    if (std::find(devices.begin(), devices.end(), meta.device) == devices.end())
      fail(errc::malformed_input,
           "file '" + path.filename().string() + "' names unknown device '" + meta.device + "'");

    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) fail(errc::malformed_input, path.string() + ":1: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != imu_csv_header())
      fail(errc::malformed_input, path.string() + ":1: unexpected header '" + line + "'");

    DeviceStream stream;
    stream.source = path.string();
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto tokens = detail::split_csv_line(line);
      if (tokens.size() != 10)
        fail(errc::malformed_input, path.string() + ":" + std::to_string(line_no) +
                                        ": expected 10 fields, got " +
                                        std::to_string(tokens.size()));
      double ts;
      if (!detail::parse_double(tokens[0], ts))
        fail(errc::malformed_input,
             path.string() + ":" + std::to_string(line_no) + ": bad timestamp '" + tokens[0] + "'");
      std::array<double, 9> row{};
      for (std::size_t i = 0; i < 9; ++i)
        if (!detail::parse_double(tokens[i + 1], row[i]))
          fail(errc::malformed_input, path.string() + ":" + std::to_string(line_no) +
                                          ": non-numeric field '" + tokens[i + 1] + "'");
      if (stream.rows.empty()) stream.first_ts = ts;
      stream.last_ts = ts;
      stream.rows.push_back(row);
    }
    if (stream.rows.size() < 2)
      fail(errc::degenerate_series, path.string() + ": fewer than 2 data rows");
    groups[{meta.participant, meta.label}][meta.device] = std::move(stream);
  }

  std::vector<RawRecording> recordings;
  std::size_t incomplete_recordings = 0;
  for (auto& [key, by_device] : groups) {
    std::size_t length = 0;
    bool first = true;
    for (const auto& [dev, stream] : by_device) {
      if (first || stream.rows.size() < length) length = stream.rows.size();
      first = false;
    }
    for (const auto& [dev, stream] : by_device)
      if (stream.rows.size() != length)
        std::cerr << "[ingest] warning: " << stream.source << " truncated to " << length
                  << " rows to match the shortest device stream\n";
    if (by_device.size() < devices.size()) ++incomplete_recordings;

    RawRecording rec;
    rec.participant_id = key.first;
    rec.label = key.second;
    rec.exercise = exercise;
    rec.modality = Modality::imu;

    double duration = 0.0;
    for (const auto& dev : devices) {
      auto it = by_device.find(dev);
      if (it == by_device.end()) continue;
      const DeviceStream& stream = it->second;
      if (rec.source.empty()) rec.source = stream.source;
      duration = std::max(duration, stream.last_ts - stream.first_ts);
      for (std::size_t c = 0; c < 9; ++c) {
        std::vector<double> channel(length);
        for (std::size_t t = 0; t < length; ++t) channel[t] = stream.rows[t][c];
        rec.series.channel_names.push_back(dev + "_" + imu_sensor_channels()[c]);
        rec.series.values.push_back(std::move(channel));
      }
    }
    if (duration > 0.0)
      rec.series.sample_rate_hz = static_cast<double>(length - 1) / duration;
    rec.series.validate();
    recordings.push_back(std::move(rec));
  }
  if (incomplete_recordings > 0)
    std::cerr << "[ingest] warning: " << incomplete_recordings
              << " recordings carry fewer than " << devices.size() << " devices\n";
  return recordings;
}

/// Reads every *.jsonl under `dir` (one file per participant and class, one
/// JSON object per frame: {"frame": t, "keypoints": [[x, y, confidence] x
/// 25]} in BODY-25 order). Channels come out keypoint-major ("Nose_x",
/// "Nose_y", ...) for the requested keypoint subset; frames with confidence
/// <= 0 are treated as missing and repaired by linear interpolation from the
/// neighbouring frames (nearest value at the edges).
inline std::vector<RawRecording> ingest_keypoints(
    const std::filesystem::path& dir, Exercise exercise,
    const std::vector<std::string>& keypoints =
        {body25_keypoint_names().begin(), body25_keypoint_names().end()},
    double fps = 30.0) {
  if (!std::filesystem::is_directory(dir))
    fail(errc::io_error, "'" + dir.string() + "' is not a directory");
  const auto& classes = class_labels(exercise);
  const auto& body25 = body25_keypoint_names();

  std::vector<std::size_t> selected;
  for (const auto& name : keypoints) {
    auto it = std::find(body25.begin(), body25.end(), name);
    if (it == body25.end()) fail(errc::bad_config, "unknown keypoint '" + name + "'");
    selected.push_back(static_cast<std::size_t>(it - body25.begin()));
  }

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<RawRecording> recordings;
  for (const auto& path : files) {
    std::string stem = path.stem().string();
    auto us = stem.find('_');
    if (us == std::string::npos || us + 1 >= stem.size())
      fail(errc::malformed_input,
           "keypoint filename '" + path.filename().string() + "' is not <participant>_<label>.jsonl");
    std::string participant = stem.substr(0, us);
    std::string label = stem.substr(us + 1);
    if (std::find(classes.begin(), classes.end(), label) == classes.end())
      fail(errc::unknown_label, "file '" + path.filename().string() + "' has class '" + label +
                                    "' unknown to " + exercise_name(exercise));

    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open '" + path.string() + "'");

    struct Frame {
      long long index;
      std::array<std::array<double, 3>, 25> keypoints;
    };
    std::vector<Frame> frames;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        fail(errc::malformed_input,
             path.string() + ":" + std::to_string(line_no) + ": bad JSON: " + e.what());
      }
      if (!j.contains("frame") || !j.contains("keypoints") || !j["keypoints"].is_array() ||
          j["keypoints"].size() != 25)
        fail(errc::malformed_input, path.string() + ":" + std::to_string(line_no) +
                                        ": record needs 'frame' and 25 keypoint triples");
      Frame f;
      f.index = j["frame"].get<long long>();
      for (std::size_t k = 0; k < 25; ++k) {
        const auto& triple = j["keypoints"][k];
        if (!triple.is_array() || triple.size() != 3)
          fail(errc::malformed_input, path.string() + ":" + std::to_string(line_no) +
                                          ": keypoint " + std::to_string(k) + " is not [x,y,c]");
        for (std::size_t c = 0; c < 3; ++c) f.keypoints[k][c] = triple[c].get<double>();
      }
      frames.push_back(std::move(f));
    }
    if (frames.empty()) fail(errc::frame_count_zero, path.string() + ": no frames");
    std::stable_sort(frames.begin(), frames.end(),
                     [](const Frame& a, const Frame& b) { return a.index < b.index; });

    RawRecording rec;
    rec.participant_id = participant;
    rec.label = label;
    rec.exercise = exercise;
    rec.modality = Modality::video;
    rec.source = path.string();
    rec.series.sample_rate_hz = fps;

    std::size_t T = frames.size();
    for (std::size_t k : selected) {
      std::vector<double> xs(T), ys(T);
      std::vector<bool> seen(T);
      for (std::size_t t = 0; t < T; ++t) {
        xs[t] = frames[t].keypoints[k][0];
        ys[t] = frames[t].keypoints[k][1];
        seen[t] = frames[t].keypoints[k][2] > 0.0;
      }
      rec.series.channel_names.push_back(body25[k] + "_x");
      rec.series.values.push_back(repair_gaps(xs, seen));
      rec.series.channel_names.push_back(body25[k] + "_y");
      rec.series.values.push_back(repair_gaps(ys, seen));
    }
    rec.series.validate();
    recordings.push_back(std::move(rec));
  }
  std::sort(recordings.begin(), recordings.end(), [](const RawRecording& a, const RawRecording& b) {
    if (a.participant_id != b.participant_id) return a.participant_id < b.participant_id;
    return a.label < b.label;
  });
  return recordings;
}

// ---------------------------------------------------------------------------
// Re-serialization (shared with the synthetic generator)
// ---------------------------------------------------------------------------

/// Writes one device's stream as the canonical CSV layout. Timestamps are
/// derived from the sample rate. Values use %.17g.
inline void write_imu_device_csv(const std::filesystem::path& path,
                                 const MultivariateSeries& device9, double sample_rate_hz) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot open '" + path.string() + "' for writing");
  out << imu_csv_header() << '\n';
  char buf[40];
  for (std::size_t t = 0; t < device9.length(); ++t) {
    std::snprintf(buf, sizeof buf, "%.9f", static_cast<double>(t) / sample_rate_hz);
    out << buf;
    for (std::size_t c = 0; c < 9; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", device9.values[c][t]);
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) fail(errc::io_error, "failed writing '" + path.string() + "'");
}

/// Writes a 25-keypoint recording as newline-delimited JSON frames.
/// `xy` holds 50 channels in keypoint-major order; `confidence` holds 25
/// per-keypoint confidence tracks.
inline void write_keypoint_jsonl(const std::filesystem::path& path,
                                 const std::vector<std::vector<double>>& xy,
                                 const std::vector<std::vector<double>>& confidence) {
  if (xy.size() != 50 || confidence.size() != 25)
    fail(errc::shape_mismatch, "keypoint writer expects 50 xy channels and 25 confidence tracks");
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot open '" + path.string() + "' for writing");
  std::size_t T = xy.front().size();
  for (std::size_t t = 0; t < T; ++t) {
    nlohmann::json frame;
    frame["frame"] = t;
    nlohmann::json kps = nlohmann::json::array();
    for (std::size_t k = 0; k < 25; ++k)
      kps.push_back({xy[2 * k][t], xy[2 * k + 1][t], confidence[k][t]});
    frame["keypoints"] = std::move(kps);
    out << frame.dump() << '\n';
  }
  if (!out) fail(errc::io_error, "failed writing '" + path.string() + "'");
}

}  // namespace repkit
