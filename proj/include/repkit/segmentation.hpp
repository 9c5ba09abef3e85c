#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "repkit/error.hpp"
#include "repkit/series.hpp"

namespace repkit {

/// Peak-detection settings for cutting a continuous multi-repetition
/// recording into per-repetition windows. Thresholds are relative (fractions
/// of the anchor range and of the nominal repetition spacing) so one config
/// serves magnetometer units and pixel units alike.
struct SegmentationConfig {
  std::string anchor_channel;
  std::size_t expected_reps = 10;
  double min_separation_fraction = 0.5;  // of length / expected_reps
  double prominence_fraction = 0.25;     // of the smoothed anchor's range
  std::size_t smoothing_window = 11;     // odd, moving average

  void validate() const {
    if (expected_reps == 0) fail(errc::bad_config, "expected_reps must be positive");
    if (min_separation_fraction <= 0.0 || min_separation_fraction >= 1.0)
      fail(errc::bad_config, "min_separation_fraction must lie in (0,1)");
    if (prominence_fraction <= 0.0 || prominence_fraction >= 1.0)
      fail(errc::bad_config, "prominence_fraction must lie in (0,1)");
    if (smoothing_window == 0 || smoothing_window % 2 == 0)
      fail(errc::bad_config, "smoothing_window must be odd and positive");
  }
};

struct SegmentBoundaries {
  std::vector<std::size_t> boundaries;  // strictly increasing, size rep_count + 1
  std::size_t rep_count = 0;
};

/// Centered moving average; the window shrinks symmetrically at the edges.
inline std::vector<double> moving_average(const std::vector<double>& x, std::size_t window) {
  std::size_t n = x.size();
  std::size_t half = window / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i >= half ? i - half : 0;
    std::size_t hi = std::min(n - 1, i + half);
    double s = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) s += x[k];
    out[i] = s / static_cast<double>(hi - lo + 1);
  }
  return out;
}

namespace detail {

// Prominence of the peak at index p: walk out on each side until a strictly
// higher point (or the boundary), take the minimum of each stretch, and
// measure the drop from the peak to the higher of the two minima.
inline double peak_prominence(const std::vector<double>& s, std::size_t p) {
  double h = s[p];
  double left_min = h;
  for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(p) - 1; i >= 0; --i) {
    if (s[i] > h) break;
    left_min = std::min(left_min, s[i]);
  }
  double right_min = h;
  for (std::size_t i = p + 1; i < s.size(); ++i) {
    if (s[i] > h) break;
    right_min = std::min(right_min, s[i]);
  }
  return h - std::max(left_min, right_min);
}

}  // namespace detail

/// Indices of local maxima of the smoothed channel that clear both the
/// prominence and the separation thresholds. When candidates conflict on
/// separation, the higher-prominence one wins (ties to the lower index).
/// May return an empty list.
inline std::vector<std::size_t> detect_peaks(const std::vector<double>& channel,
                                             const SegmentationConfig& config) {
  config.validate();
  std::size_t n = channel.size();
  if (n < 3) fail(errc::too_short, "detect_peaks needs at least 3 samples");

  std::vector<double> s = moving_average(channel, config.smoothing_window);

  // Interior local maxima; plateaus collapse to their middle index.
  std::vector<std::size_t> candidates;
  std::size_t i = 1;
  while (i + 1 < n) {
    if (s[i] > s[i - 1]) {
      std::size_t j = i;
      while (j + 1 < n && s[j + 1] == s[i]) ++j;
      if (j + 1 < n && s[j + 1] < s[i]) candidates.push_back((i + j) / 2);
      i = j + 1;
    } else {
      ++i;
    }
  }
  if (candidates.empty()) return {};

  double range = *std::max_element(s.begin(), s.end()) - *std::min_element(s.begin(), s.end());
  double min_prominence = config.prominence_fraction * range;

  std::vector<std::pair<double, std::size_t>> ranked;  // (prominence, index)
  for (std::size_t p : candidates) {
    double prom = detail::peak_prominence(s, p);
    if (prom >= min_prominence && prom > 0.0) ranked.emplace_back(prom, p);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  double min_sep = config.min_separation_fraction * static_cast<double>(n) /
                   static_cast<double>(config.expected_reps);
  std::vector<std::size_t> kept;
  for (const auto& [prom, p] : ranked) {
    bool clash = false;
    for (std::size_t q : kept) {
      double d = p > q ? static_cast<double>(p - q) : static_cast<double>(q - p);
      if (d < min_sep) {
        clash = true;
        break;
      }
    }
    if (!clash) kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

/// Cuts the series at midpoints between consecutive anchor peaks, with the
/// recording start/end as outer boundaries. The windows tile the full extent
/// with no overlap and no gap; each repetition's peak sits inside its window.
/// Errors when the detected repetition count differs from expected_reps by
/// more than 1 (a corrupt recording), or when no peak is found at all.
inline std::pair<SegmentBoundaries, std::vector<MultivariateSeries>> segment_repetitions(
    const MultivariateSeries& series, const SegmentationConfig& config) {
  auto anchor_idx = series.channel_index(config.anchor_channel);
  if (!anchor_idx)
    fail(errc::missing_anchor, "anchor channel '" + config.anchor_channel + "' not present");

  std::vector<std::size_t> peaks = detect_peaks(series.values[*anchor_idx], config);
  std::size_t detected = peaks.size();
  auto diff = detected > config.expected_reps ? detected - config.expected_reps
                                              : config.expected_reps - detected;
  if (detected == 0 || diff > 1)
    fail(errc::rep_count_mismatch, "detected " + std::to_string(detected) +
                                       " repetitions, expected " +
                                       std::to_string(config.expected_reps));

  std::size_t n = series.length();
  SegmentBoundaries sb;
  sb.rep_count = detected;
  sb.boundaries.push_back(0);
  for (std::size_t k = 1; k < detected; ++k)
    sb.boundaries.push_back((peaks[k - 1] + peaks[k]) / 2);
  sb.boundaries.push_back(n);
  for (std::size_t k = 1; k < sb.boundaries.size(); ++k)
    if (sb.boundaries[k] <= sb.boundaries[k - 1])
      fail(errc::rep_count_mismatch, "degenerate cut points between peaks");

  std::vector<MultivariateSeries> segments;
  segments.reserve(detected);
  for (std::size_t k = 0; k < detected; ++k) {
    std::size_t lo = sb.boundaries[k], hi = sb.boundaries[k + 1];
    if (hi - lo < 2) fail(errc::degenerate_series, "segment shorter than 2 samples");
    MultivariateSeries seg;
    seg.channel_names = series.channel_names;
    seg.sample_rate_hz = series.sample_rate_hz;
    seg.values.reserve(series.num_channels());
    for (const auto& ch : series.values)
      seg.values.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(lo),
                              ch.begin() + static_cast<std::ptrdiff_t>(hi));
    segments.push_back(std::move(seg));
  }
  return {std::move(sb), std::move(segments)};
}

}  // namespace repkit
