#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "repkit/error.hpp"
#include "repkit/ingest.hpp"
#include "repkit/rng.hpp"
#include "repkit/series.hpp"

namespace repkit {

/// Per-class signal shape: an oscillation at `freq_cycles_per_rep` inside
/// each repetition, with the given amplitude and phase offset.
struct SynthClassSignal {
  double freq_cycles_per_rep = 2.0;
  double amplitude = 0.8;
  double phase = 0.0;
};

/// Generator parameters for a synthetic two-modality dataset with known
/// ground truth. Every recording holds `reps_per_recording` repetitions of a
/// raised-cosine base motion (one peak per repetition) plus a class-dependent
/// within-repetition oscillation; repetition durations vary per participant
/// and per repetition. Classes can carry different signal parameters per
/// modality, which is how complementary-modality datasets are built.
struct SynthSpec {
  Exercise exercise = Exercise::military_press;
  std::size_t num_participants = 40;
  std::size_t reps_per_recording = 10;
  double noise_sigma = 0.05;
  double imu_rate_hz = 51.2;
  double video_fps = 30.0;
  double rep_duration_min = 1.7;
  double rep_duration_max = 2.5;
  double keypoint_dropout_prob = 0.0;
  std::vector<std::string> devices = {imu_device_order().begin(), imu_device_order().end()};
  std::vector<SynthClassSignal> imu_class_signals;    // defaults filled per exercise
  std::vector<SynthClassSignal> video_class_signals;  // defaults = imu_class_signals
  std::uint64_t seed = 1;

  std::vector<SynthClassSignal> resolved_signals(Modality m) const {
    std::size_t k = class_labels(exercise).size();
    const auto& chosen = m == Modality::imu ? imu_class_signals : video_class_signals;
    if (!chosen.empty()) {
      if (chosen.size() != k)
        fail(errc::bad_config, "class signal table must have one entry per class");
      return chosen;
    }
    if (m == Modality::video && !imu_class_signals.empty()) return resolved_signals(Modality::imu);
    std::vector<SynthClassSignal> defaults;
    for (std::size_t c = 0; c < k; ++c)
      defaults.push_back({2.0 + static_cast<double>(c), 0.8, 0.0});
    return defaults;
  }

  std::string participant_name(std::size_t i) const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "P%03zu", i + 1);
    return buf;
  }
};

namespace detail {

// Substream purposes for one (participant, class) recording.
enum class SynthStream : std::uint64_t { timeline = 0, imu_noise = 1, video_noise = 2, confidence = 3 };

inline std::uint64_t synth_stream_seed(const SynthSpec& spec, std::size_t participant,
                                       std::size_t cls, SynthStream purpose) {
  std::size_t k = class_labels(spec.exercise).size();
  std::uint64_t id = (static_cast<std::uint64_t>(participant) * k + cls) * 4 +
                     static_cast<std::uint64_t>(purpose);
  return SplitMix64::substream_seed(spec.seed, id);
}

struct Timeline {
  std::vector<double> rep_starts;  // size reps + 1; last entry = total duration
  double class_phase = 0.0;        // recording-level random phase of the class component

  double total() const { return rep_starts.back(); }

  /// Fraction through the current repetition at time t, in [0, 1).
  double rep_fraction(double t) const {
    std::size_t reps = rep_starts.size() - 1;
    for (std::size_t r = reps; r-- > 0;)
      if (t >= rep_starts[r])
        return std::min((t - rep_starts[r]) / (rep_starts[r + 1] - rep_starts[r]), 1.0);
    return 0.0;
  }
};

inline Timeline make_timeline(const SynthSpec& spec, std::size_t participant, std::size_t cls) {
  SplitMix64 rng(synth_stream_seed(spec, participant, cls, SynthStream::timeline));
  double base = rng.next_uniform(spec.rep_duration_min, spec.rep_duration_max);
  Timeline tl;
  tl.rep_starts.push_back(0.0);
  for (std::size_t r = 0; r < spec.reps_per_recording; ++r) {
    double jitter = 1.0 + 0.08 * (rng.next_unit() - 0.5);
    tl.rep_starts.push_back(tl.rep_starts.back() + base * jitter);
  }
  tl.class_phase = rng.next_uniform(0.0, 2.0 * 3.14159265358979323846);
  return tl;
}

struct ChannelGains {
  double anchor, cls, offset;
};

/// Fixed per-sensor gain table; mag_y is the segmentation anchor.
inline const std::array<ChannelGains, 9>& imu_channel_gains() {
  static const std::array<ChannelGains, 9> gains = {{
      {0.20, 1.00, 0.00},   // acc_x
      {0.40, 0.70, 0.10},   // acc_y
      {0.30, 0.50, 1.00},   // acc_z (gravity offset)
      {0.50, 0.90, 0.00},   // gyro_x
      {0.30, 0.80, 0.00},   // gyro_y
      {0.20, 0.60, 0.00},   // gyro_z
      {0.60, 0.40, 0.30},   // mag_x
      {1.50, 0.30, -0.20},  // mag_y (anchor)
      {0.50, 0.30, 0.20},   // mag_z
  }};
  return gains;
}

inline ChannelGains video_channel_gains(std::size_t keypoint, bool is_y) {
  // Wrists and elbows move the most; lower body is nearly static.
  double anchor = 0.05, cls = 0.05;
  switch (keypoint) {
    case 7: anchor = is_y ? 1.50 : 0.30; cls = 0.80; break;  // LWrist
    case 4: anchor = is_y ? 1.20 : 0.30; cls = 0.80; break;  // RWrist
    case 6: anchor = is_y ? 0.80 : 0.20; cls = 0.70; break;  // LElbow
    case 3: anchor = is_y ? 0.80 : 0.20; cls = 0.70; break;  // RElbow
    case 5: anchor = is_y ? 0.40 : 0.10; cls = 0.50; break;  // LShoulder
    case 2: anchor = is_y ? 0.40 : 0.10; cls = 0.50; break;  // RShoulder
    case 0: anchor = 0.15; cls = 0.20; break;                // Nose
    case 1: anchor = 0.15; cls = 0.20; break;                // Neck
    default: break;
  }
  double offset = is_y ? 0.1 + 0.035 * static_cast<double>(keypoint)
                       : 0.3 + 0.020 * static_cast<double>(keypoint);
  return {anchor, cls, offset};
}

inline double base_motion(double rep_fraction) {
  return 0.5 - 0.5 * std::cos(2.0 * 3.14159265358979323846 * rep_fraction);
}

}  // namespace detail

/// In-memory IMU recording for one (participant, class); channels are
/// device-major over spec.devices.
inline RawRecording synth_imu_recording(const SynthSpec& spec, std::size_t participant,
                                        std::size_t cls) {
  const auto& labels = class_labels(spec.exercise);
  auto signals = spec.resolved_signals(Modality::imu);
  detail::Timeline tl = detail::make_timeline(spec, participant, cls);
  SplitMix64 noise(detail::synth_stream_seed(spec, participant, cls, detail::SynthStream::imu_noise));

  auto n = static_cast<std::size_t>(std::floor(tl.total() * spec.imu_rate_hz)) + 1;
  RawRecording rec;
  rec.participant_id = spec.participant_name(participant);
  rec.exercise = spec.exercise;
  rec.label = labels[cls];
  rec.modality = Modality::imu;
  rec.source = "synth";
  rec.series.sample_rate_hz = spec.imu_rate_hz;

  const SynthClassSignal& sig = signals[cls];
  constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
  for (std::size_t di = 0; di < spec.devices.size(); ++di) {
    double device_scale = 1.0 - 0.06 * static_cast<double>(di);
    for (std::size_t s = 0; s < 9; ++s) {
      const auto& g = detail::imu_channel_gains()[s];
      std::vector<double> channel(n);
      for (std::size_t t = 0; t < n; ++t) {
        double time = static_cast<double>(t) / spec.imu_rate_hz;
        double frac = tl.rep_fraction(time);
        double value = g.offset + device_scale * g.anchor * detail::base_motion(frac) +
                       device_scale * g.cls * sig.amplitude *
                           std::sin(kTwoPi * sig.freq_cycles_per_rep * frac + sig.phase +
                                    tl.class_phase + 0.4 * static_cast<double>(s));
        channel[t] = value + spec.noise_sigma * noise.next_normal();
      }
      rec.series.channel_names.push_back(spec.devices[di] + "_" + imu_sensor_channels()[s]);
      rec.series.values.push_back(std::move(channel));
    }
  }
  return rec;
}

/// In-memory clean video recording (all 25 keypoints, 50 channels) plus the
/// per-keypoint confidence tracks; dropout zeroes the affected frames.
struct SynthVideoRecording {
  RawRecording recording;                       // values before gap repair
  std::vector<std::vector<double>> confidence;  // 25 tracks
};

inline SynthVideoRecording synth_video_recording(const SynthSpec& spec, std::size_t participant,
                                                 std::size_t cls) {
  const auto& labels = class_labels(spec.exercise);
  auto signals = spec.resolved_signals(Modality::video);
  detail::Timeline tl = detail::make_timeline(spec, participant, cls);
  SplitMix64 noise(detail::synth_stream_seed(spec, participant, cls, detail::SynthStream::video_noise));
  SplitMix64 conf_rng(detail::synth_stream_seed(spec, participant, cls, detail::SynthStream::confidence));

  auto n = static_cast<std::size_t>(std::floor(tl.total() * spec.video_fps)) + 1;
  SynthVideoRecording out;
  RawRecording& rec = out.recording;
  rec.participant_id = spec.participant_name(participant);
  rec.exercise = spec.exercise;
  rec.label = labels[cls];
  rec.modality = Modality::video;
  rec.source = "synth";
  rec.series.sample_rate_hz = spec.video_fps;

  const SynthClassSignal& sig = signals[cls];
  constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
  const auto& body25 = body25_keypoint_names();
  for (std::size_t k = 0; k < 25; ++k) {
    for (int coord = 0; coord < 2; ++coord) {
      bool is_y = coord == 1;
      auto g = detail::video_channel_gains(k, is_y);
      std::vector<double> channel(n);
      for (std::size_t t = 0; t < n; ++t) {
        double time = static_cast<double>(t) / spec.video_fps;
        double frac = tl.rep_fraction(time);
        // Lifts reduce the image-space y coordinate.
        double direction = is_y ? -1.0 : 1.0;
        double value = g.offset + direction * g.anchor * detail::base_motion(frac) +
                       g.cls * sig.amplitude *
                           std::sin(kTwoPi * sig.freq_cycles_per_rep * frac + sig.phase +
                                    tl.class_phase + 0.3 * static_cast<double>(k) +
                                    (is_y ? 0.0 : 1.1));
        channel[t] = value + spec.noise_sigma * noise.next_normal();
      }
      rec.series.channel_names.push_back(body25[k] + (is_y ? "_y" : "_x"));
      rec.series.values.push_back(std::move(channel));
    }
  }
  out.confidence.resize(25);
  for (std::size_t k = 0; k < 25; ++k) {
    out.confidence[k].resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      double c = 0.75 + 0.2 * conf_rng.next_unit();
      if (spec.keypoint_dropout_prob > 0.0 && conf_rng.next_unit() < spec.keypoint_dropout_prob) {
        c = 0.0;
        rec.series.values[2 * k][t] = 0.0;
        rec.series.values[2 * k + 1][t] = 0.0;
      }
      out.confidence[k][t] = c;
    }
  }
  return out;
}

/// In-memory dataset as the ingest step would deliver it: gap-repaired video
/// channels, all keypoints present.
inline std::vector<RawRecording> synth_recordings(const SynthSpec& spec, Modality modality) {
  const auto& labels = class_labels(spec.exercise);
  std::vector<RawRecording> out;
  for (std::size_t p = 0; p < spec.num_participants; ++p) {
    for (std::size_t c = 0; c < labels.size(); ++c) {
      if (modality == Modality::imu) {
        out.push_back(synth_imu_recording(spec, p, c));
      } else {
        SynthVideoRecording v = synth_video_recording(spec, p, c);
        RawRecording rec = std::move(v.recording);
        for (std::size_t k = 0; k < 25; ++k) {
          std::vector<bool> seen(v.confidence[k].size());
          for (std::size_t t = 0; t < seen.size(); ++t) seen[t] = v.confidence[k][t] > 0.0;
          rec.series.values[2 * k] = repair_gaps(rec.series.values[2 * k], seen);
          rec.series.values[2 * k + 1] = repair_gaps(rec.series.values[2 * k + 1], seen);
        }
        out.push_back(std::move(rec));
      }
    }
  }
  return out;
}

/// Writes the dataset in both ingestion formats under out_root/imu and
/// out_root/video. Same spec and seed give byte-identical files.
inline void synth_dataset(const SynthSpec& spec, const std::filesystem::path& out_root,
                          bool write_imu = true, bool write_video = true) {
  const auto& labels = class_labels(spec.exercise);
  if (write_imu) {
    std::filesystem::create_directories(out_root / "imu");
    for (std::size_t p = 0; p < spec.num_participants; ++p) {
      for (std::size_t c = 0; c < labels.size(); ++c) {
        RawRecording rec = synth_imu_recording(spec, p, c);
        for (std::size_t di = 0; di < spec.devices.size(); ++di) {
          MultivariateSeries device;
          device.sample_rate_hz = rec.series.sample_rate_hz;
          for (std::size_t s = 0; s < 9; ++s) {
            device.channel_names.push_back(imu_sensor_channels()[s]);
            device.values.push_back(rec.series.values[di * 9 + s]);
          }
          auto path = out_root / "imu" /
                      (rec.participant_id + "_" + rec.label + "_" + spec.devices[di] + ".csv");
          write_imu_device_csv(path, device, spec.imu_rate_hz);
        }
      }
    }
  }
  if (write_video) {
    std::filesystem::create_directories(out_root / "video");
    for (std::size_t p = 0; p < spec.num_participants; ++p) {
      for (std::size_t c = 0; c < labels.size(); ++c) {
        SynthVideoRecording v = synth_video_recording(spec, p, c);
        auto path = out_root / "video" /
                    (v.recording.participant_id + "_" + v.recording.label + ".jsonl");
        write_keypoint_jsonl(path, v.recording.series.values, v.confidence);
      }
    }
  }
}

}  // namespace repkit
