#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "repkit/error.hpp"

namespace repkit {

enum class Modality { imu, video };

inline const char* modality_name(Modality m) { return m == Modality::imu ? "imu" : "video"; }

inline Modality modality_from_name(std::string_view name) {
  if (name == "imu") return Modality::imu;
  if (name == "video") return Modality::video;
  fail(errc::bad_config, "unknown modality '" + std::string(name) + "'");
}

enum class Exercise { military_press, rowing };

inline const char* exercise_name(Exercise e) {
  return e == Exercise::military_press ? "military_press" : "rowing";
}

inline Exercise exercise_from_name(std::string_view name) {
  if (name == "military_press") return Exercise::military_press;
  if (name == "rowing") return Exercise::rowing;
  fail(errc::bad_config, "unknown exercise '" + std::string(name) + "'");
}

/// Class labels for each exercise, in reporting order.
inline const std::vector<std::string>& class_labels(Exercise e) {
  static const std::vector<std::string> mp = {"N", "A", "R", "Arch"};
  static const std::vector<std::string> rowing = {"N", "A", "Ext", "R", "RB"};
  return e == Exercise::military_press ? mp : rowing;
}

/// A named channels-by-time matrix; the atom of all processing.
struct MultivariateSeries {
  std::vector<std::string> channel_names;
  std::vector<std::vector<double>> values;  // [channel][time]
  std::optional<double> sample_rate_hz;

  std::size_t num_channels() const { return values.size(); }
  std::size_t length() const { return values.empty() ? 0 : values.front().size(); }

  std::optional<std::size_t> channel_index(std::string_view name) const {
    for (std::size_t i = 0; i < channel_names.size(); ++i)
      if (channel_names[i] == name) return i;
    return std::nullopt;
  }

  const std::vector<double>& channel(std::string_view name) const {
    auto idx = channel_index(name);
    if (!idx) fail(errc::missing_channel, "no channel named '" + std::string(name) + "'");
    return values[*idx];
  }

  /// Enforces the type invariants: equal channel lengths >= 2, aligned names,
  /// finite values, positive sample rate when present.
  void validate() const {
    if (values.empty()) fail(errc::degenerate_series, "series has no channels");
    if (channel_names.size() != values.size())
      fail(errc::shape_mismatch, "channel_names and values disagree on channel count");
    std::size_t len = values.front().size();
    if (len < 2) fail(errc::degenerate_series, "channel length must be >= 2");
    for (std::size_t c = 0; c < values.size(); ++c) {
      if (values[c].size() != len)
        fail(errc::shape_mismatch, "channel '" + channel_names[c] + "' has mismatched length");
      for (double v : values[c])
        if (!std::isfinite(v))
          fail(errc::malformed_input, "non-finite value in channel '" + channel_names[c] + "'");
    }
    if (sample_rate_hz && *sample_rate_hz <= 0.0)
      fail(errc::bad_config, "sample_rate_hz must be positive");
  }
};

/// One segmented repetition with its metadata; the classification unit.
struct LabeledSample {
  MultivariateSeries series;
  std::string label;
  std::string participant_id;
  Modality modality = Modality::imu;
  std::size_t repetition_index = 0;
};

struct Dataset {
  std::vector<LabeledSample> samples;
  Exercise exercise = Exercise::military_press;
  std::size_t target_length = 161;
};

/// Piecewise-linear resampling onto a uniform grid of `target_length` points.
/// First and last values of every channel are preserved exactly. Pure.
inline MultivariateSeries resample_linear(const MultivariateSeries& series,
                                          std::size_t target_length) {
  std::size_t n = series.length();
  if (n < 2) fail(errc::degenerate_series, "cannot resample a series shorter than 2");
  if (target_length < 2) fail(errc::degenerate_series, "target_length must be >= 2");

  MultivariateSeries out;
  out.channel_names = series.channel_names;
  out.values.reserve(series.num_channels());
  if (series.sample_rate_hz)
    out.sample_rate_hz = *series.sample_rate_hz * static_cast<double>(target_length - 1) /
                         static_cast<double>(n - 1);

  double step = static_cast<double>(n - 1) / static_cast<double>(target_length - 1);
  for (const auto& src : series.values) {
    std::vector<double> dst(target_length);
    dst.front() = src.front();
    dst.back() = src.back();
    for (std::size_t i = 1; i + 1 < target_length; ++i) {
      double pos = step * static_cast<double>(i);
      auto lo = static_cast<std::size_t>(pos);
      if (lo >= n - 1) lo = n - 2;
      double frac = pos - static_cast<double>(lo);
      dst[i] = src[lo] + frac * (src[lo + 1] - src[lo]);
    }
    out.values.push_back(std::move(dst));
  }
  return out;
}

inline double channel_mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Population standard deviation.
inline double channel_std(const std::vector<double>& x) {
  double m = channel_mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size()));
}

/// Per-channel z-normalization (zero mean, unit population std). Channels with
/// std below 1e-8 map to all-zeros: the mean is removed and no division
/// happens, so flat channels (e.g. occluded joints) stay finite. Pure.
inline MultivariateSeries znormalize(const MultivariateSeries& series) {
  MultivariateSeries out;
  out.channel_names = series.channel_names;
  out.sample_rate_hz = series.sample_rate_hz;
  out.values.reserve(series.num_channels());
  for (const auto& src : series.values) {
    double m = channel_mean(src);
    double sd = channel_std(src);
    std::vector<double> dst(src.size());
    if (sd < 1e-8) {
      // already all zeros
    } else {
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = (src[i] - m) / sd;
    }
    out.values.push_back(std::move(dst));
  }
  return out;
}

/// Repairs missing values (observed[i] == false) by linear interpolation from
/// the nearest observed neighbours; leading/trailing gaps take the nearest
/// observed value. A fully unobserved vector comes back as all zeros.
inline std::vector<double> repair_gaps(const std::vector<double>& values,
                                       const std::vector<bool>& observed) {
  if (values.size() != observed.size())
    fail(errc::shape_mismatch, "repair_gaps: mask length differs from value length");
  std::size_t n = values.size();
  std::vector<double> out(n, 0.0);

  std::ptrdiff_t first = -1, last = -1;
  for (std::size_t i = 0; i < n; ++i)
    if (observed[i]) {
      if (first < 0) first = static_cast<std::ptrdiff_t>(i);
      last = static_cast<std::ptrdiff_t>(i);
    }
  if (first < 0) return out;

  for (std::ptrdiff_t i = 0; i < first; ++i) out[i] = values[first];
  for (std::size_t i = static_cast<std::size_t>(last) + 1; i < n; ++i) out[i] = values[last];

  std::ptrdiff_t prev = -1;
  for (std::ptrdiff_t i = first; i <= last; ++i) {
    if (!observed[i]) continue;
    out[i] = values[i];
    if (prev >= 0 && i - prev > 1) {
      double span = static_cast<double>(i - prev);
      for (std::ptrdiff_t k = prev + 1; k < i; ++k) {
        double frac = static_cast<double>(k - prev) / span;
        out[k] = values[prev] + frac * (values[i] - values[prev]);
      }
    }
    prev = i;
  }
  return out;
}

}  // namespace repkit
