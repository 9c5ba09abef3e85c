#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "repkit/error.hpp"
#include "repkit/matrix.hpp"
#include "repkit/parallel.hpp"
#include "repkit/rng.hpp"
#include "repkit/series.hpp"

namespace repkit {

/// One random convolutional kernel. Weights are standard-normal draws,
/// mean-centered per channel row; taps are spaced `dilation` apart.
struct Kernel {
  int length = 0;                                // 7, 9 or 11
  std::vector<std::vector<double>> weights;      // [selected channel][tap]
  double bias = 0.0;                             // in [-1, 1]
  int dilation = 1;
  int padding = 0;                               // 0 or ((length-1)*dilation)/2
  std::vector<int> channel_indices;              // sorted, distinct
};

struct KernelSet {
  std::vector<Kernel> kernels;
  std::size_t num_kernels = 0;
  std::size_t input_length = 0;
  std::size_t num_channels = 0;
  std::uint64_t seed = 0;
};

/// Draws `num_kernels` kernels. Kernel k consumes its own RNG substream
/// (SplitMix64::substream_seed(seed, k)) with a frozen draw order:
/// length, dilation exponent, padding flag, bias, channel-count exponent,
/// channel choice (partial Fisher-Yates), then weights row by row.
/// Regeneration from the same arguments is bit-identical.
inline KernelSet generate_kernels(std::size_t num_kernels, std::size_t num_channels,
                                  std::size_t input_length, std::uint64_t seed) {
  if (num_kernels < 1) fail(errc::bad_config, "num_kernels must be >= 1");
  if (num_channels < 1) fail(errc::bad_config, "num_channels must be >= 1");
  if (input_length < 11)
    fail(errc::too_short, "input_length " + std::to_string(input_length) +
                              " is below the minimum of 11");

  static const int kLengths[3] = {7, 9, 11};
  KernelSet set;
  set.num_kernels = num_kernels;
  set.input_length = input_length;
  set.num_channels = num_channels;
  set.seed = seed;
  set.kernels.reserve(num_kernels);

  std::size_t max_channel_exp =
      static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(num_channels))));

  std::vector<int> channel_pool(num_channels);
  for (std::size_t k = 0; k < num_kernels; ++k) {
    SplitMix64 rng(SplitMix64::substream_seed(seed, k));
    Kernel kern;
    kern.length = kLengths[rng.next_below(3)];

    double max_exp = std::log2(static_cast<double>(input_length - 1) /
                               static_cast<double>(kern.length - 1));
    kern.dilation = static_cast<int>(std::floor(std::exp2(rng.next_uniform(0.0, max_exp))));
    if (kern.dilation < 1) kern.dilation = 1;

    bool pad = rng.next_unit() < 0.5;
    kern.padding = pad ? ((kern.length - 1) * kern.dilation) / 2 : 0;

    kern.bias = rng.next_uniform(-1.0, 1.0);

    std::size_t exp = rng.next_below(max_channel_exp + 1);
    std::size_t n_sel = std::min<std::size_t>(std::size_t{1} << exp, num_channels);

    for (std::size_t i = 0; i < num_channels; ++i) channel_pool[i] = static_cast<int>(i);
    for (std::size_t i = 0; i < n_sel; ++i) {
      std::size_t j = i + rng.next_below(num_channels - i);
      std::swap(channel_pool[i], channel_pool[j]);
    }
    kern.channel_indices.assign(channel_pool.begin(),
                                channel_pool.begin() + static_cast<std::ptrdiff_t>(n_sel));
    std::sort(kern.channel_indices.begin(), kern.channel_indices.end());

    kern.weights.resize(n_sel);
    for (auto& row : kern.weights) {
      row.resize(kern.length);
      double mean = 0.0;
      for (auto& w : row) {
        w = rng.next_normal();
        mean += w;
      }
      mean /= static_cast<double>(kern.length);
      for (auto& w : row) w -= mean;
    }
    set.kernels.push_back(std::move(kern));
  }
  return set;
}

namespace detail {

/// Convolution outputs for one kernel over one sample, written into `out`
/// (resized to the output count). Outputs are taken at every start offset of
/// the zero-padded series: position t covers input indices t - padding + j *
/// dilation for tap j, and taps falling outside the series read zero. Output
/// count is therefore length + 2 * padding.
inline void kernel_outputs(const MultivariateSeries& sample, const Kernel& kernel,
                           std::vector<double>& out) {
  std::ptrdiff_t len = static_cast<std::ptrdiff_t>(sample.length());
  std::ptrdiff_t pad = kernel.padding;
  std::ptrdiff_t span = static_cast<std::ptrdiff_t>(kernel.length - 1) * kernel.dilation + 1;
  if (span > len + 2 * pad)
    fail(errc::span_exceeds_input, "kernel span " + std::to_string(span) +
                                       " exceeds padded input " + std::to_string(len + 2 * pad));
  std::ptrdiff_t positions = len + 2 * pad;
  out.assign(static_cast<std::size_t>(positions), kernel.bias);

  for (std::size_t r = 0; r < kernel.channel_indices.size(); ++r) {
    int ch = kernel.channel_indices[r];
    if (ch < 0 || ch >= static_cast<int>(sample.num_channels()))
      fail(errc::shape_mismatch, "kernel reads channel " + std::to_string(ch) +
                                     " but sample has " + std::to_string(sample.num_channels()));
    const double* x = sample.values[static_cast<std::size_t>(ch)].data();
    const auto& w = kernel.weights[r];
    for (int j = 0; j < kernel.length; ++j) {
      double wj = w[static_cast<std::size_t>(j)];
      // out[t] += wj * x[t - pad + j*dilation] over the in-range span of t
      std::ptrdiff_t shift = pad - static_cast<std::ptrdiff_t>(j) * kernel.dilation;
      std::ptrdiff_t t_lo = std::max<std::ptrdiff_t>(0, shift);
      std::ptrdiff_t t_hi = std::min(positions - 1, shift + len - 1);
      const double* src = x + (t_lo - shift);
      double* dst = out.data() + t_lo;
      std::ptrdiff_t cnt = t_hi - t_lo + 1;
      for (std::ptrdiff_t q = 0; q < cnt; ++q) dst[q] += wj * src[q];
    }
  }
}

}  // namespace detail

/// PPV (fraction of outputs > 0) and maximum of the kernel's outputs.
inline std::pair<double, double> apply_kernel(const MultivariateSeries& sample,
                                              const Kernel& kernel) {
  std::vector<double> out;
  detail::kernel_outputs(sample, kernel, out);
  std::size_t positive = 0;
  double mx = out.front();
  for (double v : out) {
    if (v > 0.0) ++positive;
    if (v > mx) mx = v;
  }
  return {static_cast<double>(positive) / static_cast<double>(out.size()), mx};
}

/// Feature matrix row i = concatenated (ppv, max) pairs of sample i over all
/// kernels in generation order. Parallel over samples; output is identical
/// for any thread count.
inline FeatureMatrix rocket_transform(const std::vector<const MultivariateSeries*>& samples,
                                      const KernelSet& kernels, unsigned threads = 0) {
  // Validate everything here; the parallel workers below must not throw.
  for (const auto* s : samples) {
    if (s->length() != kernels.input_length)
      fail(errc::shape_mismatch, "sample length " + std::to_string(s->length()) +
                                     " != kernel input length " +
                                     std::to_string(kernels.input_length));
    if (s->num_channels() != kernels.num_channels)
      fail(errc::shape_mismatch, "sample has " + std::to_string(s->num_channels()) +
                                     " channels, kernel set expects " +
                                     std::to_string(kernels.num_channels));
  }
  for (const auto& k : kernels.kernels) {
    auto span = static_cast<std::size_t>(k.length - 1) * static_cast<std::size_t>(k.dilation) + 1;
    if (span > kernels.input_length + 2 * static_cast<std::size_t>(k.padding))
      fail(errc::span_exceeds_input, "kernel span " + std::to_string(span) +
                                         " exceeds padded input length");
    for (int ch : k.channel_indices)
      if (ch < 0 || ch >= static_cast<int>(kernels.num_channels))
        fail(errc::shape_mismatch, "kernel channel index out of range");
    if (k.weights.size() != k.channel_indices.size())
      fail(errc::shape_mismatch, "kernel weight rows disagree with channel indices");
  }

  FeatureMatrix features(samples.size(), 2 * kernels.kernels.size());
  features.column_names.reserve(features.cols);
  for (std::size_t k = 0; k < kernels.kernels.size(); ++k) {
    features.column_names.push_back("k" + std::to_string(k) + "_ppv");
    features.column_names.push_back("k" + std::to_string(k) + "_max");
  }

  parallel_for(
      0, samples.size(),
      [&](std::size_t i) {
        std::vector<double> out;
        double* row = features.row(i);
        for (std::size_t k = 0; k < kernels.kernels.size(); ++k) {
          const Kernel& kern = kernels.kernels[k];
          detail::kernel_outputs(*samples[i], kern, out);
          std::size_t positive = 0;
          double mx = out.front();
          for (double v : out) {
            if (v > 0.0) ++positive;
            if (v > mx) mx = v;
          }
          row[2 * k] = static_cast<double>(positive) / static_cast<double>(out.size());
          row[2 * k + 1] = mx;
        }
      },
      threads);
  return features;
}

inline FeatureMatrix rocket_transform(const Dataset& dataset, const KernelSet& kernels,
                                      unsigned threads = 0) {
  std::vector<const MultivariateSeries*> ptrs;
  ptrs.reserve(dataset.samples.size());
  for (const auto& s : dataset.samples) ptrs.push_back(&s.series);
  return rocket_transform(ptrs, kernels, threads);
}

inline constexpr int kKernelSetFormatVersion = 1;

inline nlohmann::json kernel_set_to_json(const KernelSet& set) {
  nlohmann::json j;
  j["format_version"] = kKernelSetFormatVersion;
  j["type"] = "repkit.kernel_set";
  j["seed"] = set.seed;
  j["num_kernels"] = set.num_kernels;
  j["input_length"] = set.input_length;
  j["num_channels"] = set.num_channels;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& k : set.kernels) {
    arr.push_back({{"length", k.length},
                   {"dilation", k.dilation},
                   {"padding", k.padding},
                   {"bias", k.bias},
                   {"channels", k.channel_indices},
                   {"weights", k.weights}});
  }
  j["kernels"] = std::move(arr);
  return j;
}

inline KernelSet kernel_set_from_json(const nlohmann::json& j) {
  if (!j.contains("type") || j["type"] != "repkit.kernel_set")
    fail(errc::malformed_input, "not a kernel set artifact");
  if (j["format_version"].get<int>() != kKernelSetFormatVersion)
    fail(errc::malformed_input, "unsupported kernel set format version");
  KernelSet set;
  set.seed = j["seed"].get<std::uint64_t>();
  set.num_kernels = j["num_kernels"].get<std::size_t>();
  set.input_length = j["input_length"].get<std::size_t>();
  set.num_channels = j["num_channels"].get<std::size_t>();
  for (const auto& jk : j["kernels"]) {
    Kernel k;
    k.length = jk["length"].get<int>();
    k.dilation = jk["dilation"].get<int>();
    k.padding = jk["padding"].get<int>();
    k.bias = jk["bias"].get<double>();
    k.channel_indices = jk["channels"].get<std::vector<int>>();
    k.weights = jk["weights"].get<std::vector<std::vector<double>>>();
    set.kernels.push_back(std::move(k));
  }
  if (set.kernels.size() != set.num_kernels)
    fail(errc::malformed_input, "kernel count disagrees with num_kernels");
  return set;
}

inline void save_kernels(const KernelSet& set, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot open '" + path.string() + "' for writing");
  out << kernel_set_to_json(set).dump(1) << '\n';
  if (!out) fail(errc::io_error, "failed writing '" + path.string() + "'");
}

inline KernelSet load_kernels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::malformed_input, "bad kernel set file '" + path.string() + "': " + e.what());
  }
  return kernel_set_from_json(j);
}

}  // namespace repkit
