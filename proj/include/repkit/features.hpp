#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "repkit/error.hpp"
#include "repkit/matrix.hpp"
#include "repkit/parallel.hpp"
#include "repkit/series.hpp"

namespace repkit {

namespace detail {

constexpr double kVarFloor = 1e-24;  // below this a signal counts as constant

struct Moments {
  double mean = 0.0, var = 0.0, std = 0.0, skew = 0.0, kurt = 0.0;
};

inline Moments moments(const std::vector<double>& x) {
  Moments m;
  std::size_t n = x.size();
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(n);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    double d = v - m.mean;
    double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  m.var = m2;
  m.std = std::sqrt(m2);
  if (m2 < kVarFloor) return m;  // skew/kurt stay 0 on constant input
  m.skew = m3 / (m2 * m.std);
  m.kurt = m4 / (m2 * m2) - 3.0;
  return m;
}

/// Quantile with linear interpolation between order statistics
/// (index q*(n-1) into the sorted values).
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  std::size_t n = sorted.size();
  double pos = q * static_cast<double>(n - 1);
  auto lo = static_cast<std::size_t>(pos);
  if (lo >= n - 1) return sorted[n - 1];
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// Autocorrelation at the given lag: sum_t (x_t - mu)(x_{t+lag} - mu) divided
/// by sum_t (x_t - mu)^2. Constant signals map to 0.
inline double autocorrelation(const std::vector<double>& x, std::size_t lag, double mean,
                              double var) {
  std::size_t n = x.size();
  if (lag >= n || var < kVarFloor) return 0.0;
  double num = 0.0;
  for (std::size_t t = 0; t + lag < n; ++t) num += (x[t] - mean) * (x[t + lag] - mean);
  return num / (var * static_cast<double>(n));
}

/// Power spectrum |X_k|^2 for k = 0..n/2 via direct DFT (signals here are a
/// few hundred samples, so O(n^2) is cheap and dependency-free).
inline std::vector<double> power_spectrum(const std::vector<double>& x) {
  std::size_t n = x.size();
  std::size_t half = n / 2;
  std::vector<double> cos_tab(n), sin_tab(n);
  constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
  for (std::size_t j = 0; j < n; ++j) {
    double a = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    cos_tab[j] = std::cos(a);
    sin_tab[j] = std::sin(a);
  }
  std::vector<double> power(half + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    double re = 0.0, im = 0.0;
    std::size_t idx = 0;
    for (std::size_t t = 0; t < n; ++t) {
      re += x[t] * cos_tab[idx];
      im -= x[t] * sin_tab[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    power[k] = re * re + im * im;
  }
  return power;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Handcrafted features (18 per signal)
// ---------------------------------------------------------------------------

inline const std::array<std::string, 18>& handcrafted_feature_names() {
  static const std::array<std::string, 18> names = {
      "mean",          "std",        "skewness",       "kurtosis",       "min",
      "max",           "range",      "median",         "q25",            "q75",
      "iqr",           "rms",        "energy",         "mean_crossings", "acf1",
      "dominant_freq", "spec_centroid", "spec_entropy"};
  return names;
}

/// Fixed 18-element time/frequency descriptor of one signal, in the order of
/// handcrafted_feature_names():
///   mean, population std, skewness, excess kurtosis, min, max, range,
///   median, 25th/75th percentile, IQR, RMS, energy (sum x^2 / n),
///   mean-crossing count, lag-1 autocorrelation, dominant frequency (Hz, DC
///   excluded), spectral centroid (Hz), spectral entropy (normalized log of
///   the non-DC power distribution, in [0,1]).
/// Degenerate spectra (constant signals) define dominant frequency, centroid
/// and entropy as 0; the same rule zeroes skewness, kurtosis and acf1.
inline std::array<double, 18> handcrafted_features(const std::vector<double>& x,
                                                   double sample_rate_hz) {
  std::size_t n = x.size();
  if (n < 8) fail(errc::too_short, "handcrafted_features needs at least 8 samples");
  if (sample_rate_hz <= 0.0) fail(errc::bad_config, "sample rate must be positive");

  auto m = detail::moments(x);
  std::vector<double> sorted(x);
  std::sort(sorted.begin(), sorted.end());
  double mn = sorted.front(), mx = sorted.back();
  double median = detail::quantile_sorted(sorted, 0.50);
  double q25 = detail::quantile_sorted(sorted, 0.25);
  double q75 = detail::quantile_sorted(sorted, 0.75);

  double energy = 0.0;
  for (double v : x) energy += v * v;
  energy /= static_cast<double>(n);
  double rms = std::sqrt(energy);

  double crossings = 0.0;
  for (std::size_t t = 0; t + 1 < n; ++t)
    if ((x[t] - m.mean) * (x[t + 1] - m.mean) < 0.0) crossings += 1.0;

  double acf1 = detail::autocorrelation(x, 1, m.mean, m.var);

  double dom_freq = 0.0, centroid = 0.0, entropy = 0.0;
  if (m.var >= detail::kVarFloor) {
    std::vector<double> power = detail::power_spectrum(x);
    std::size_t half = n / 2;
    double total = 0.0;
    for (std::size_t k = 1; k <= half; ++k) total += power[k];
    if (total > 0.0) {
      std::size_t best = 1;
      for (std::size_t k = 2; k <= half; ++k)
        if (power[k] > power[best]) best = k;
      dom_freq = static_cast<double>(best) * sample_rate_hz / static_cast<double>(n);
      double h = 0.0;
      for (std::size_t k = 1; k <= half; ++k) {
        double p = power[k] / total;
        centroid += static_cast<double>(k) * sample_rate_hz / static_cast<double>(n) * p;
        if (p > 0.0) h -= p * std::log(p);
      }
      entropy = half > 1 ? h / std::log(static_cast<double>(half)) : 0.0;
    }
  }

  return {m.mean, m.std,  m.skew,   m.kurt, mn,   mx,       mx - mn,  median,  q25,
          q75,    q75 - q25, rms,   energy, crossings, acf1, dom_freq, centroid, entropy};
}

// ---------------------------------------------------------------------------
// Automated feature catalogue (22 per signal)
// ---------------------------------------------------------------------------

inline const std::array<std::string, 22>& auto_feature_names() {
  static const std::array<std::string, 22> names = {
      "hist_mode5",       "hist_mode10",     "acf1",           "acf2",
      "acf_first_zero",   "acf_first_1e",    "above_mean_frac", "longest_above_run",
      "mean_abs_change",  "trev",            "quantile_skew",   "iqr_range_ratio",
      "spec_centroid_n",  "spec_rolloff85",  "spec_flatness",   "forecast_ma3_err",
      "updown_motif2",    "median_motif3",   "outlier_time_pos", "outlier_time_neg",
      "mean_cross_rate",  "extrema_rate"};
  return names;
}

namespace detail {

inline double histogram_mode(const std::vector<double>& x, std::size_t bins, double mn,
                             double mx) {
  if (mx - mn <= 0.0) return x.front();
  std::vector<std::size_t> counts(bins, 0);
  double width = (mx - mn) / static_cast<double>(bins);
  for (double v : x) {
    auto b = static_cast<std::size_t>((v - mn) / width);
    if (b >= bins) b = bins - 1;
    ++counts[b];
  }
  std::size_t best = 0;
  for (std::size_t b = 1; b < bins; ++b)
    if (counts[b] > counts[best]) best = b;
  return mn + (static_cast<double>(best) + 0.5) * width;
}

}  // namespace detail

/// Fixed catalogue of 22 canonical statistics, in the order of
/// auto_feature_names(). Definitions (n = length, mu/sigma = population
/// moments, q_p = linearly interpolated percentile, P_k = non-DC power
/// spectrum bins k = 1..n/2):
///
///   hist_mode5 / hist_mode10 : center of the fullest of 5 (10) equal-width
///       bins spanning [min, max]; the raw value when the range is zero.
///   acf1, acf2               : autocorrelation at lags 1 and 2.
///   acf_first_zero           : smallest lag tau in [1, n/2] with acf <= 0,
///       divided by n (0.5 when none).
///   acf_first_1e             : smallest lag with acf < 1/e, divided by n
///       (0.5 when none).
///   above_mean_frac          : #(x > mu) / n.
///   longest_above_run        : longest consecutive run with x > mu, / n.
///   mean_abs_change          : mean |x_{t+1} - x_t|.
///   trev                     : mean((x_{t+1}-x_t)^3) / mean((x_{t+1}-x_t)^2)^{3/2},
///       a time-reversal asymmetry score (0 when the changes are all ~0).
///   quantile_skew            : ((q90-q50)-(q50-q10)) / (q90-q10), 0 on zero range.
///   iqr_range_ratio          : (q75-q25) / (max-min), 0 on zero range.
///   spec_centroid_n          : spectral centroid as a fraction of Nyquist.
///   spec_rolloff85           : smallest k with cumulative power >= 85%, / (n/2).
///   spec_flatness            : geometric / arithmetic mean of P_k.
///   forecast_ma3_err         : RMS one-step error of the 3-point moving-average
///       forecast, divided by sigma (forecastability; 0 for constant input).
///   updown_motif2            : rate of the most common length-2 word over the
///       binary up/down symbols sign(x_{t+1}-x_t).
///   median_motif3            : rate of the most common length-3 word over the
///       binary above/below-median symbols.
///   outlier_time_pos/neg     : mean normalized time index t/(n-1) of points
///       beyond mu +/- sigma (0.5 when no such point).
///   mean_cross_rate          : mean-crossing count / (n-1).
///   extrema_rate             : fraction of interior points that are local
///       extrema of the sequence.
///
/// All degenerate cases (constant signal, zero denominators) map to the
/// stated fallbacks so the output is always finite.
inline std::array<double, 22> auto_features(const std::vector<double>& x) {
  std::size_t n = x.size();
  if (n < 8) fail(errc::too_short, "auto_features needs at least 8 samples");

  auto m = detail::moments(x);
  std::vector<double> sorted(x);
  std::sort(sorted.begin(), sorted.end());
  double mn = sorted.front(), mx = sorted.back();
  double q10 = detail::quantile_sorted(sorted, 0.10);
  double q50 = detail::quantile_sorted(sorted, 0.50);
  double q90 = detail::quantile_sorted(sorted, 0.90);
  double q25 = detail::quantile_sorted(sorted, 0.25);
  double q75 = detail::quantile_sorted(sorted, 0.75);

  double mode5 = detail::histogram_mode(x, 5, mn, mx);
  double mode10 = detail::histogram_mode(x, 10, mn, mx);

  double acf1 = detail::autocorrelation(x, 1, m.mean, m.var);
  double acf2 = detail::autocorrelation(x, 2, m.mean, m.var);

  std::size_t half = n / 2;
  double first_zero = 0.5, first_1e = 0.5;
  bool found_zero = false, found_1e = false;
  constexpr double kInvE = 0.36787944117144233;
  for (std::size_t lag = 1; lag <= half && !(found_zero && found_1e); ++lag) {
    double a = detail::autocorrelation(x, lag, m.mean, m.var);
    if (!found_zero && a <= 0.0) {
      first_zero = static_cast<double>(lag) / static_cast<double>(n);
      found_zero = true;
    }
    if (!found_1e && a < kInvE) {
      first_1e = static_cast<double>(lag) / static_cast<double>(n);
      found_1e = true;
    }
  }

  std::size_t above = 0, run = 0, best_run = 0;
  for (double v : x) {
    if (v > m.mean) {
      ++above;
      ++run;
      best_run = std::max(best_run, run);
    } else {
      run = 0;
    }
  }

  double abs_change = 0.0, change2 = 0.0, change3 = 0.0;
  for (std::size_t t = 0; t + 1 < n; ++t) {
    double d = x[t + 1] - x[t];
    abs_change += std::abs(d);
    change2 += d * d;
    change3 += d * d * d;
  }
  abs_change /= static_cast<double>(n - 1);
  change2 /= static_cast<double>(n - 1);
  change3 /= static_cast<double>(n - 1);
  double trev = change2 < detail::kVarFloor ? 0.0 : change3 / std::pow(change2, 1.5);

  double quantile_skew = (q90 - q10) > 0.0 ? ((q90 - q50) - (q50 - q10)) / (q90 - q10) : 0.0;
  double iqr_range = (mx - mn) > 0.0 ? (q75 - q25) / (mx - mn) : 0.0;

  double centroid_n = 0.0, rolloff = 0.0, flatness = 0.0;
  if (m.var >= detail::kVarFloor && half >= 1) {
    std::vector<double> power = detail::power_spectrum(x);
    double total = 0.0;
    for (std::size_t k = 1; k <= half; ++k) total += power[k];
    if (total > 0.0) {
      double cum = 0.0, log_sum = 0.0;
      std::size_t roll_k = half;
      bool rolled = false;
      for (std::size_t k = 1; k <= half; ++k) {
        double p = power[k] / total;
        centroid_n += static_cast<double>(k) / static_cast<double>(half) * p;
        cum += p;
        if (!rolled && cum >= 0.85) {
          roll_k = k;
          rolled = true;
        }
        log_sum += std::log(std::max(power[k], 1e-300));
      }
      rolloff = static_cast<double>(roll_k) / static_cast<double>(half);
      double geo = std::exp(log_sum / static_cast<double>(half));
      flatness = geo / (total / static_cast<double>(half));
    }
  }

  double forecast_err = 0.0;
  if (m.std >= 1e-12 && n > 3) {
    double se = 0.0;
    for (std::size_t t = 3; t < n; ++t) {
      double pred = (x[t - 1] + x[t - 2] + x[t - 3]) / 3.0;
      se += (x[t] - pred) * (x[t] - pred);
    }
    forecast_err = std::sqrt(se / static_cast<double>(n - 3)) / m.std;
  }

  double motif2 = 0.0;
  if (n >= 3) {
    std::array<std::size_t, 4> counts{};
    for (std::size_t t = 0; t + 2 < n; ++t) {
      int a = x[t + 1] - x[t] > 0.0 ? 1 : 0;
      int b = x[t + 2] - x[t + 1] > 0.0 ? 1 : 0;
      ++counts[static_cast<std::size_t>(2 * a + b)];
    }
    motif2 = static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
             static_cast<double>(n - 2);
  }
  double motif3 = 0.0;
  {
    std::array<std::size_t, 8> counts{};
    for (std::size_t t = 0; t + 2 < n; ++t) {
      int a = x[t] > q50 ? 1 : 0;
      int b = x[t + 1] > q50 ? 1 : 0;
      int c = x[t + 2] > q50 ? 1 : 0;
      ++counts[static_cast<std::size_t>(4 * a + 2 * b + c)];
    }
    motif3 = static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
             static_cast<double>(n - 2);
  }

  double time_pos = 0.5, time_neg = 0.5;
  if (m.std >= 1e-12) {
    double sum_pos = 0.0, sum_neg = 0.0;
    std::size_t n_pos = 0, n_neg = 0;
    for (std::size_t t = 0; t < n; ++t) {
      double idx = static_cast<double>(t) / static_cast<double>(n - 1);
      if (x[t] > m.mean + m.std) {
        sum_pos += idx;
        ++n_pos;
      } else if (x[t] < m.mean - m.std) {
        sum_neg += idx;
        ++n_neg;
      }
    }
    if (n_pos > 0) time_pos = sum_pos / static_cast<double>(n_pos);
    if (n_neg > 0) time_neg = sum_neg / static_cast<double>(n_neg);
  }

  double crossings = 0.0;
  for (std::size_t t = 0; t + 1 < n; ++t)
    if ((x[t] - m.mean) * (x[t + 1] - m.mean) < 0.0) crossings += 1.0;
  double cross_rate = crossings / static_cast<double>(n - 1);

  std::size_t extrema = 0;
  for (std::size_t t = 1; t + 1 < n; ++t)
    if ((x[t] - x[t - 1]) * (x[t + 1] - x[t]) < 0.0) ++extrema;
  double extrema_rate = static_cast<double>(extrema) / static_cast<double>(n - 2);

  return {mode5,      mode10,   acf1,       acf2,        first_zero, first_1e,
          static_cast<double>(above) / static_cast<double>(n),
          static_cast<double>(best_run) / static_cast<double>(n),
          abs_change, trev,     quantile_skew, iqr_range, centroid_n, rolloff,
          flatness,   forecast_err, motif2,  motif3,      time_pos,   time_neg,
          cross_rate, extrema_rate};
}

// ---------------------------------------------------------------------------
// Derived IMU channels
// ---------------------------------------------------------------------------

/// Appends the 5 derived signals to a single device's 9 raw channels
/// (acc/gyro/mag x/y/z, in that order; names may carry a device prefix such
/// as "LW_"). Static-orientation formulas:
///   pitch = atan2(-acc_x, sqrt(acc_y^2 + acc_z^2))
///   roll  = atan2(acc_y, acc_z)
///   yaw   = tilt-compensated magnetometer heading from pitch/roll
/// plus the accelerometer and gyroscope vector magnitudes. Output has 14
/// channels per device.
inline MultivariateSeries derive_imu_channels(const MultivariateSeries& device) {
  static const std::array<std::string, 9> kRaw = {"acc_x",  "acc_y",  "acc_z",
                                                  "gyro_x", "gyro_y", "gyro_z",
                                                  "mag_x",  "mag_y",  "mag_z"};
  // Accept either bare names or a common "<dev>_" prefix.
  std::string prefix;
  if (!device.channel_index("acc_x")) {
    const std::string& first = device.channel_names.empty() ? "" : device.channel_names.front();
    auto pos = first.rfind("acc_x");
    if (pos == std::string::npos || pos == 0)
      fail(errc::missing_channel, "device series lacks an acc_x channel");
    prefix = first.substr(0, pos);
  }
  std::array<const std::vector<double>*, 9> ch{};
  for (std::size_t i = 0; i < 9; ++i) {
    auto idx = device.channel_index(prefix + kRaw[i]);
    if (!idx) fail(errc::missing_channel, "device series lacks channel " + prefix + kRaw[i]);
    ch[i] = &device.values[*idx];
  }

  std::size_t n = device.length();
  std::vector<double> pitch(n), roll(n), yaw(n), acc_mag(n), gyro_mag(n);
  const auto &ax = *ch[0], &ay = *ch[1], &az = *ch[2];
  const auto &gx = *ch[3], &gy = *ch[4], &gz = *ch[5];
  const auto &mx = *ch[6], &my = *ch[7], &mz = *ch[8];
  for (std::size_t t = 0; t < n; ++t) {
    pitch[t] = std::atan2(-ax[t], std::sqrt(ay[t] * ay[t] + az[t] * az[t]));
    roll[t] = std::atan2(ay[t], az[t]);
    double sp = std::sin(pitch[t]), cp = std::cos(pitch[t]);
    double sr = std::sin(roll[t]), cr = std::cos(roll[t]);
    double mx_c = mx[t] * cp + my[t] * sp * sr + mz[t] * sp * cr;
    double my_c = my[t] * cr - mz[t] * sr;
    yaw[t] = std::atan2(-my_c, mx_c);
    acc_mag[t] = std::sqrt(ax[t] * ax[t] + ay[t] * ay[t] + az[t] * az[t]);
    gyro_mag[t] = std::sqrt(gx[t] * gx[t] + gy[t] * gy[t] + gz[t] * gz[t]);
  }

  MultivariateSeries out = device;
  out.channel_names.push_back(prefix + "pitch");
  out.channel_names.push_back(prefix + "roll");
  out.channel_names.push_back(prefix + "yaw");
  out.channel_names.push_back(prefix + "acc_mag");
  out.channel_names.push_back(prefix + "gyro_mag");
  out.values.push_back(std::move(pitch));
  out.values.push_back(std::move(roll));
  out.values.push_back(std::move(yaw));
  out.values.push_back(std::move(acc_mag));
  out.values.push_back(std::move(gyro_mag));
  return out;
}

// ---------------------------------------------------------------------------
// Dataset featurization
// ---------------------------------------------------------------------------

enum class FeatureStrategy { raw_rocket, handcrafted, automatic };

inline const char* feature_strategy_name(FeatureStrategy s) {
  switch (s) {
    case FeatureStrategy::raw_rocket: return "raw_rocket";
    case FeatureStrategy::handcrafted: return "handcrafted";
    case FeatureStrategy::automatic: return "auto";
  }
  return "unknown";
}

inline FeatureStrategy feature_strategy_from_name(std::string_view name) {
  if (name == "raw_rocket") return FeatureStrategy::raw_rocket;
  if (name == "handcrafted") return FeatureStrategy::handcrafted;
  if (name == "auto") return FeatureStrategy::automatic;
  fail(errc::bad_config, "unknown feature strategy '" + std::string(name) + "'");
}

namespace detail {

/// Splits a multi-device IMU series ("<dev>_acc_x", ...) into one 9-channel
/// series per device, in channel order of first appearance.
inline std::vector<MultivariateSeries> split_devices(const MultivariateSeries& series) {
  std::vector<std::string> order;
  std::map<std::string, MultivariateSeries> groups;
  for (std::size_t c = 0; c < series.num_channels(); ++c) {
    const std::string& name = series.channel_names[c];
    auto us = name.find('_');
    if (us == std::string::npos)
      fail(errc::missing_channel, "IMU channel '" + name + "' lacks a device prefix");
    std::string dev = name.substr(0, us);
    auto [it, inserted] = groups.try_emplace(dev);
    if (inserted) {
      order.push_back(dev);
      it->second.sample_rate_hz = series.sample_rate_hz;
    }
    it->second.channel_names.push_back(name);
    it->second.values.push_back(series.values[c]);
  }
  std::vector<MultivariateSeries> out;
  out.reserve(order.size());
  for (const auto& dev : order) out.push_back(std::move(groups[dev]));
  return out;
}

}  // namespace detail

/// Tabular featurization of a prepared dataset. The handcrafted strategy is
/// defined for IMU data only: each device's 9 raw channels grow to 14 via
/// derive_imu_channels, then every signal yields 18 features (5 devices ->
/// 70 x 18 = 1260 columns). The automatic strategy applies the 22-feature
/// catalogue to every channel as-is. With normalize_signals set, each signal
/// is z-normalized right before featurization (derived channels are computed
/// from the raw values first).
inline FeatureMatrix featurize_dataset(const Dataset& dataset, FeatureStrategy strategy,
                                       bool normalize_signals = true, unsigned threads = 0) {
  if (strategy == FeatureStrategy::raw_rocket)
    fail(errc::strategy_mismatch, "raw_rocket is not a tabular strategy; use rocket_transform");
  if (dataset.samples.empty()) fail(errc::shape_mismatch, "empty dataset");

  // Validate up front; worker threads below must not throw.
  const auto& first_sample = dataset.samples.front();
  for (const auto& s : dataset.samples) {
    if (strategy == FeatureStrategy::handcrafted && s.modality != Modality::imu)
      fail(errc::strategy_mismatch, "handcrafted features are defined only for IMU samples");
    s.series.validate();
    if (s.series.length() < 8)
      fail(errc::too_short, "sample series shorter than 8 cannot be featurized");
    if (s.series.channel_names != first_sample.series.channel_names)
      fail(errc::shape_mismatch, "samples disagree on channel layout");
  }

  // Featurize the first sample serially to fix the column layout.
  auto featurize_one = [&](const LabeledSample& sample, std::vector<double>& row_out,
                           std::vector<std::string>* names_out) {
    row_out.clear();
    double fs = sample.series.sample_rate_hz.value_or(1.0);
    auto emit_signal = [&](const std::string& name, const std::vector<double>& signal) {
      std::vector<double> sig = signal;
      if (normalize_signals) {
        double mu = channel_mean(sig);
        double sd = channel_std(sig);
        if (sd < 1e-8) {
          std::fill(sig.begin(), sig.end(), 0.0);
        } else {
          for (auto& v : sig) v = (v - mu) / sd;
        }
      }
      if (strategy == FeatureStrategy::handcrafted) {
        auto f = handcrafted_features(sig, fs);
        row_out.insert(row_out.end(), f.begin(), f.end());
        if (names_out)
          for (const auto& fn : handcrafted_feature_names())
            names_out->push_back(name + "__" + fn);
      } else {
        auto f = auto_features(sig);
        row_out.insert(row_out.end(), f.begin(), f.end());
        if (names_out)
          for (const auto& fn : auto_feature_names()) names_out->push_back(name + "__" + fn);
      }
    };

    if (strategy == FeatureStrategy::handcrafted) {
      for (const auto& device : detail::split_devices(sample.series)) {
        MultivariateSeries extended = derive_imu_channels(device);
        for (std::size_t c = 0; c < extended.num_channels(); ++c)
          emit_signal(extended.channel_names[c], extended.values[c]);
      }
    } else {
      for (std::size_t c = 0; c < sample.series.num_channels(); ++c)
        emit_signal(sample.series.channel_names[c], sample.series.values[c]);
    }
  };

  std::vector<std::string> names;
  std::vector<double> first_row;
  featurize_one(dataset.samples.front(), first_row, &names);

  FeatureMatrix out(dataset.samples.size(), first_row.size());
  out.column_names = std::move(names);
  std::copy(first_row.begin(), first_row.end(), out.row(0));

  parallel_for(
      1, dataset.samples.size(),
      [&](std::size_t i) {
        std::vector<double> row;
        featurize_one(dataset.samples[i], row, nullptr);
        std::copy(row.begin(), row.end(), out.row(i));
      },
      threads);
  return out;
}

}  // namespace repkit
