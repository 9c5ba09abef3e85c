#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "oracles.hpp"
#include "repkit/rng.hpp"
#include "repkit/rocket.hpp"

using namespace repkit;

namespace {

MultivariateSeries random_sample(std::size_t channels, std::size_t length, SplitMix64& rng) {
  MultivariateSeries s;
  for (std::size_t c = 0; c < channels; ++c) {
    s.channel_names.push_back("ch" + std::to_string(c));
    std::vector<double> ch(length);
    for (auto& v : ch) v = rng.next_normal();
    s.values.push_back(std::move(ch));
  }
  return s;
}

bool kernel_sets_equal(const KernelSet& a, const KernelSet& b) {
  if (a.kernels.size() != b.kernels.size()) return false;
  for (std::size_t i = 0; i < a.kernels.size(); ++i) {
    const auto &ka = a.kernels[i], &kb = b.kernels[i];
    if (ka.length != kb.length || ka.dilation != kb.dilation || ka.padding != kb.padding ||
        ka.bias != kb.bias || ka.channel_indices != kb.channel_indices ||
        ka.weights != kb.weights)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("generate_kernels is deterministic and respects its contracts", "[rocket]") {
  auto a = generate_kernels(100, 8, 161, 42);
  auto b = generate_kernels(100, 8, 161, 42);
  REQUIRE(kernel_sets_equal(a, b));

  for (const auto& k : a.kernels) {
    REQUIRE((k.length == 7 || k.length == 9 || k.length == 11));
    REQUIRE(k.dilation >= 1);
    REQUIRE((k.padding == 0 || k.padding == ((k.length - 1) * k.dilation) / 2));
    REQUIRE(k.bias >= -1.0);
    REQUIRE(k.bias <= 1.0);
    REQUIRE((k.length - 1) * k.dilation + 1 <= 161 + 2 * k.padding);
    REQUIRE_FALSE(k.channel_indices.empty());
    REQUIRE(std::is_sorted(k.channel_indices.begin(), k.channel_indices.end()));
    // Power-of-two channel counts, within range.
    auto n_sel = k.channel_indices.size();
    REQUIRE((n_sel & (n_sel - 1)) == 0);
    REQUIRE(n_sel <= 8);
    for (int ch : k.channel_indices) {
      REQUIRE(ch >= 0);
      REQUIRE(ch < 8);
    }
    for (const auto& row : k.weights) {
      double mean = 0.0;
      for (double w : row) mean += w;
      REQUIRE(std::abs(mean / static_cast<double>(row.size())) < 1e-9);
    }
  }
}

TEST_CASE("single-channel inputs always select channel 0", "[rocket]") {
  auto set = generate_kernels(50, 1, 64, 3);
  for (const auto& k : set.kernels) REQUIRE(k.channel_indices == std::vector<int>{0});
}

TEST_CASE("dilation honors the analytic bound", "[rocket]") {
  // input_length 161, kernel length 11: floor(2^log2(160/10)) = 16.
  auto set = generate_kernels(2000, 4, 161, 9);
  for (const auto& k : set.kernels) {
    if (k.length == 11) REQUIRE(k.dilation <= 16);
    REQUIRE(k.dilation <= static_cast<int>((161 - 1) / (k.length - 1)));
  }
}

TEST_CASE("generate_kernels rejects too-short inputs", "[rocket]") {
  try {
    generate_kernels(10, 3, 10, 1);
    FAIL("expected too-short");
  } catch (const Error& e) {
    REQUIRE(e.code() == errc::too_short);
  }
}

TEST_CASE("apply_kernel reproduces the shifted-copy example", "[rocket]") {
  MultivariateSeries s;
  s.channel_names = {"ch0"};
  s.values = {{1.0, -1.0, 1.0, -1.0}};
  Kernel k;
  k.length = 7;
  k.dilation = 1;
  k.padding = 3;
  k.bias = 0.0;
  k.channel_indices = {0};
  k.weights = {{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}};

  auto oracle = oracles::naive_ppv_max(s, k);
  auto [ppv, mx] = apply_kernel(s, k);
  REQUIRE(ppv == Catch::Approx(oracle.first).margin(1e-12));
  REQUIRE(mx == Catch::Approx(oracle.second).margin(1e-12));
  REQUIRE(ppv == Catch::Approx(2.0 / 10.0));
  REQUIRE(mx == Catch::Approx(1.0));
}

TEST_CASE("zero input reduces apply_kernel to the bias", "[rocket]") {
  MultivariateSeries s;
  s.channel_names = {"ch0"};
  s.values = {std::vector<double>(20, 0.0)};
  Kernel k;
  k.length = 7;
  k.dilation = 2;
  k.padding = 6;
  k.channel_indices = {0};
  k.weights = {{0.3, -0.1, 0.5, -0.7, 0.2, -0.4, 0.2}};

  k.bias = -0.5;
  auto [ppv_neg, max_neg] = apply_kernel(s, k);
  REQUIRE(ppv_neg == 0.0);
  REQUIRE(max_neg == Catch::Approx(-0.5));

  k.bias = 0.5;
  auto [ppv_pos, max_pos] = apply_kernel(s, k);
  REQUIRE(ppv_pos == 1.0);
  REQUIRE(max_pos == Catch::Approx(0.5));
}

TEST_CASE("transform matches the brute-force oracle everywhere", "[rocket]") {
  SplitMix64 rng(77);
  auto kernels = generate_kernels(100, 3, 40, 5);
  std::vector<MultivariateSeries> samples;
  for (int i = 0; i < 20; ++i) samples.push_back(random_sample(3, 40, rng));

  Dataset ds;
  for (auto& s : samples) {
    LabeledSample ls;
    ls.series = s;
    ls.label = "N";
    ls.participant_id = "p";
    ds.samples.push_back(std::move(ls));
  }
  auto features = rocket_transform(ds, kernels);
  REQUIRE(features.rows == 20);
  REQUIRE(features.cols == 200);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t k = 0; k < kernels.kernels.size(); ++k) {
      auto [ppv, mx] = oracles::naive_ppv_max(samples[i], kernels.kernels[k]);
      REQUIRE(features.at(i, 2 * k) == Catch::Approx(ppv).margin(1e-9));
      REQUIRE(features.at(i, 2 * k + 1) == Catch::Approx(mx).margin(1e-9));
      REQUIRE(features.at(i, 2 * k) >= 0.0);
      REQUIRE(features.at(i, 2 * k) <= 1.0);
    }
  }
}

TEST_CASE("transform is identical for any thread count and duplicates rows", "[rocket]") {
  SplitMix64 rng(13);
  auto kernels = generate_kernels(60, 4, 50, 6);
  Dataset ds;
  for (int i = 0; i < 6; ++i) {
    LabeledSample ls;
    ls.series = random_sample(4, 50, rng);
    ls.label = "N";
    ls.participant_id = "p";
    ds.samples.push_back(std::move(ls));
  }
  ds.samples.push_back(ds.samples.front());  // duplicate

  auto serial = rocket_transform(ds, kernels, 1);
  auto parallel = rocket_transform(ds, kernels, 4);
  REQUIRE(serial.data == parallel.data);

  for (std::size_t c = 0; c < serial.cols; ++c)
    REQUIRE(serial.at(0, c) == serial.at(ds.samples.size() - 1, c));
}

TEST_CASE("permuting channels together with kernel indices leaves features unchanged",
          "[rocket]") {
  SplitMix64 rng(31);
  auto sample = random_sample(5, 48, rng);
  auto kernels = generate_kernels(80, 5, 48, 12);

  // Reverse the channels and remap every kernel accordingly.
  std::vector<std::size_t> perm = {4, 3, 2, 1, 0};
  MultivariateSeries permuted;
  permuted.channel_names.resize(5);
  permuted.values.resize(5);
  for (std::size_t c = 0; c < 5; ++c) {
    permuted.channel_names[c] = sample.channel_names[perm[c]];
    permuted.values[c] = sample.values[perm[c]];
  }
  for (const auto& kern : kernels.kernels) {
    Kernel remapped = kern;
    for (std::size_t r = 0; r < remapped.channel_indices.size(); ++r)
      remapped.channel_indices[r] = static_cast<int>(4 - remapped.channel_indices[r]);
    // Keep weights aligned with their (re-sorted) channels.
    std::vector<std::pair<int, std::vector<double>>> rows;
    for (std::size_t r = 0; r < remapped.channel_indices.size(); ++r)
      rows.emplace_back(remapped.channel_indices[r], kern.weights[r]);
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t r = 0; r < rows.size(); ++r) {
      remapped.channel_indices[r] = rows[r].first;
      remapped.weights[r] = rows[r].second;
    }
    auto [ppv_a, max_a] = apply_kernel(sample, kern);
    auto [ppv_b, max_b] = apply_kernel(permuted, remapped);
    REQUIRE(ppv_a == Catch::Approx(ppv_b).margin(1e-9));
    REQUIRE(max_a == Catch::Approx(max_b).margin(1e-9));
  }
}

TEST_CASE("kernel sets round-trip bit-exactly through their artifact", "[rocket]") {
  auto set = generate_kernels(64, 6, 120, 99);
  auto path = std::filesystem::temp_directory_path() / "repkit_kernels_test.json";
  save_kernels(set, path);
  auto loaded = load_kernels(path);
  REQUIRE(kernel_sets_equal(set, loaded));

  // Saving the loaded set again produces identical bytes.
  auto path2 = std::filesystem::temp_directory_path() / "repkit_kernels_test2.json";
  save_kernels(loaded, path2);
  std::ifstream f1(path), f2(path2);
  std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  REQUIRE(s1 == s2);
  std::filesystem::remove(path);
  std::filesystem::remove(path2);
}

TEST_CASE("shape mismatches are rejected", "[rocket]") {
  SplitMix64 rng(2);
  auto kernels = generate_kernels(10, 3, 40, 5);
  Dataset ds;
  LabeledSample ls;
  ls.series = random_sample(3, 39, rng);
  ls.label = "N";
  ls.participant_id = "p";
  ds.samples.push_back(std::move(ls));
  REQUIRE_THROWS_AS(rocket_transform(ds, kernels), Error);
}
