#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "repkit/features.hpp"
#include "repkit/ingest.hpp"
#include "repkit/rng.hpp"

using namespace repkit;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> random_signal(std::size_t n, std::uint64_t seed, double offset = 0.0) {
  SplitMix64 rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = offset + rng.next_normal();
  return x;
}

std::size_t feature_index(const std::array<std::string, 18>& names, const std::string& name) {
  return static_cast<std::size_t>(
      std::find(names.begin(), names.end(), name) - names.begin());
}

LabeledSample make_imu_sample(std::size_t devices, std::size_t length, std::uint64_t seed) {
  LabeledSample s;
  s.modality = Modality::imu;
  s.label = "N";
  s.participant_id = "P001";
  s.series.sample_rate_hz = 51.2;
  SplitMix64 rng(seed);
  for (std::size_t d = 0; d < devices; ++d) {
    for (const auto& sensor : imu_sensor_channels()) {
      s.series.channel_names.push_back(imu_device_order()[d] + "_" + sensor);
      std::vector<double> ch(length);
      for (auto& v : ch) v = rng.next_normal();
      s.series.values.push_back(std::move(ch));
    }
  }
  return s;
}

}  // namespace

TEST_CASE("handcrafted features on a constant signal follow the degenerate rules", "[features]") {
  std::vector<double> ones(8, 1.0);
  auto f = handcrafted_features(ones, 100.0);
  const auto& names = handcrafted_feature_names();
  REQUIRE(f[feature_index(names, "mean")] == Catch::Approx(1.0));
  REQUIRE(f[feature_index(names, "std")] == 0.0);
  REQUIRE(f[feature_index(names, "range")] == 0.0);
  REQUIRE(f[feature_index(names, "mean_crossings")] == 0.0);
  REQUIRE(f[feature_index(names, "spec_entropy")] == 0.0);
  REQUIRE(f[feature_index(names, "dominant_freq")] == 0.0);
  for (double v : f) REQUIRE(std::isfinite(v));
}

TEST_CASE("dominant frequency of a 5 Hz sine sampled at 100 Hz", "[features]") {
  std::vector<double> x(100);
  for (std::size_t t = 0; t < x.size(); ++t)
    x[t] = std::sin(2.0 * kPi * 5.0 * static_cast<double>(t) / 100.0);
  auto f = handcrafted_features(x, 100.0);
  double dom = f[feature_index(handcrafted_feature_names(), "dominant_freq")];
  REQUIRE(std::abs(dom - 5.0) <= 1.0);  // within one bin
}

TEST_CASE("handcrafted basics match hand computation", "[features]") {
  // Two copies of {1,2,3,4}: same mean, median and RMS as the 4-point case.
  std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 1.0, 2.0, 3.0, 4.0};
  auto f = handcrafted_features(x, 1.0);
  const auto& names = handcrafted_feature_names();
  REQUIRE(f[feature_index(names, "mean")] == Catch::Approx(2.5));
  REQUIRE(f[feature_index(names, "median")] == Catch::Approx(2.5));
  REQUIRE(f[feature_index(names, "rms")] == Catch::Approx(std::sqrt(7.5)));
  REQUIRE(f[feature_index(names, "energy")] == Catch::Approx(7.5));
  REQUIRE(f[feature_index(names, "min")] == 1.0);
  REQUIRE(f[feature_index(names, "max")] == 4.0);
}

TEST_CASE("order statistics agree with an independent streaming oracle", "[features]") {
  SplitMix64 seed_rng(400);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = random_signal(64 + seed_rng.next_below(200), 500 + trial);
    // Welford accumulator.
    double mean = 0.0, m2 = 0.0;
    double mn = x[0], mx = x[0];
    for (std::size_t i = 0; i < x.size(); ++i) {
      double delta = x[i] - mean;
      mean += delta / static_cast<double>(i + 1);
      m2 += delta * (x[i] - mean);
      mn = std::min(mn, x[i]);
      mx = std::max(mx, x[i]);
    }
    double stddev = std::sqrt(m2 / static_cast<double>(x.size()));
    auto sorted = x;
    std::sort(sorted.begin(), sorted.end());
    double median = x.size() % 2 ? sorted[x.size() / 2]
                                 : 0.5 * (sorted[x.size() / 2 - 1] + sorted[x.size() / 2]);

    auto f = handcrafted_features(x, 10.0);
    const auto& names = handcrafted_feature_names();
    REQUIRE(f[feature_index(names, "mean")] == Catch::Approx(mean).margin(1e-9));
    REQUIRE(f[feature_index(names, "std")] == Catch::Approx(stddev).margin(1e-9));
    REQUIRE(f[feature_index(names, "min")] == mn);
    REQUIRE(f[feature_index(names, "max")] == mx);
    REQUIRE(f[feature_index(names, "median")] == Catch::Approx(median).margin(1e-9));
  }
}

TEST_CASE("translation shifts location features and spares shape features", "[features]") {
  const auto& names = handcrafted_feature_names();
  auto x = random_signal(128, 42);
  auto shifted = x;
  double c = 3.75;
  for (auto& v : shifted) v += c;
  auto fa = handcrafted_features(x, 50.0);
  auto fb = handcrafted_features(shifted, 50.0);
  for (const char* name : {"mean", "median", "min", "max"}) {
    auto i = feature_index(names, name);
    REQUIRE(fb[i] == Catch::Approx(fa[i] + c).margin(1e-9));
  }
  for (const char* name :
       {"std", "skewness", "kurtosis", "iqr", "acf1", "spec_entropy", "range"}) {
    auto i = feature_index(names, name);
    REQUIRE(fb[i] == Catch::Approx(fa[i]).margin(1e-9));
  }
}

TEST_CASE("positive scaling scales amplitude features and spares shape features", "[features]") {
  const auto& names = handcrafted_feature_names();
  auto x = random_signal(128, 43);
  auto scaled = x;
  double s = 2.0;  // exact in binary floating point
  for (auto& v : scaled) v *= s;
  auto fa = handcrafted_features(x, 50.0);
  auto fb = handcrafted_features(scaled, 50.0);
  for (const char* name : {"mean", "std", "min", "max", "range", "iqr", "rms"}) {
    auto i = feature_index(names, name);
    REQUIRE(fb[i] == Catch::Approx(s * fa[i]).margin(1e-12));
  }
  for (const char* name : {"skewness", "kurtosis", "spec_entropy", "dominant_freq"}) {
    auto i = feature_index(names, name);
    REQUIRE(fb[i] == Catch::Approx(fa[i]).margin(1e-12));
  }
}

TEST_CASE("too-short signals are rejected", "[features]") {
  std::vector<double> x = {1.0, 2.0, 3.0};
  REQUIRE_THROWS_AS(handcrafted_features(x, 10.0), Error);
  REQUIRE_THROWS_AS(auto_features(x), Error);
}

TEST_CASE("auto feature catalogue has stable width and names", "[features]") {
  auto x = random_signal(64, 7);
  auto f = auto_features(x);
  REQUIRE(f.size() == 22);
  for (double v : f) REQUIRE(std::isfinite(v));
  std::set<std::string> unique(auto_feature_names().begin(), auto_feature_names().end());
  REQUIRE(unique.size() == 22);
}

TEST_CASE("lag-1 autocorrelation separates noise from a sine", "[features]") {
  const auto& names = auto_feature_names();
  auto acf_idx = static_cast<std::size_t>(
      std::find(names.begin(), names.end(), "acf1") - names.begin());

  auto noise = random_signal(400, 99);
  auto f_noise = auto_features(noise);
  REQUIRE(f_noise[acf_idx] == Catch::Approx(oracles::direct_acf1(noise)).margin(1e-12));
  REQUIRE(std::abs(f_noise[acf_idx]) < 0.15);

  std::size_t period = 25;
  std::vector<double> sine(400);
  for (std::size_t t = 0; t < sine.size(); ++t)
    sine[t] = std::sin(2.0 * kPi * static_cast<double>(t) / static_cast<double>(period));
  auto f_sine = auto_features(sine);
  REQUIRE(f_sine[acf_idx] == Catch::Approx(oracles::direct_acf1(sine)).margin(1e-12));
  REQUIRE(f_sine[acf_idx] ==
          Catch::Approx(std::cos(2.0 * kPi / static_cast<double>(period))).margin(0.05));
}

TEST_CASE("catalogue values are frozen on two fixed signals", "[features][golden]") {
  // Signal A: three-cycle sine plus a slow trend, length 64.
  std::vector<double> a(64);
  for (std::size_t t = 0; t < a.size(); ++t)
    a[t] = std::sin(2.0 * kPi * 3.0 * static_cast<double>(t) / 64.0) +
           0.01 * static_cast<double>(t);
  // Signal B: amplitude-modulated cosine with a quadratic drift, length 96.
  std::vector<double> b(96);
  for (std::size_t t = 0; t < b.size(); ++t) {
    double u = static_cast<double>(t) / 96.0;
    b[t] = std::cos(2.0 * kPi * 5.0 * u + 0.7) * (1.0 + 0.3 * std::sin(2.0 * kPi * 0.5 * u)) +
           0.2 * u * u;
  }

  // Frozen values computed with an independent implementation of the
  // documented catalogue definitions (see tests/golden/auto_features_golden.py).
  const std::vector<double> golden_a = {
      -0.608,               -0.492,
      0.953600056676839,    0.827877464163838,
      0.09375,              0.078125,
      0.5,                  0.1875,
      0.185098303747986,    0.101148587311188,
      0.0108360058035481,   0.541646898256034,
      0.0933232550945263,   0.09375,
      0.0138762933084274,   0.578666164203511,
      0.467741935483871,    0.403225806451613,
      0.546485260770975,    0.469387755102041,
      0.111111111111111,    0.0967741935483871};
  const std::vector<double> golden_b = {
      1.0836131206803,      1.21337455416457,
      0.936048869957493,    0.775028865958523,
      0.0520833333333333,   0.0416666666666667,
      0.5,                  0.104166666666667,
      0.247967433721157,    0.0282850649048368,
      -0.0335168603895953,  0.635994411389756,
      0.103998762066541,    0.104166666666667,
      0.000717720017393381, 0.632772153981307,
      0.446808510638298,    0.404255319148936,
      0.58421052631579,     0.465071770334928,
      0.105263157894737,    0.106382978723404};

  auto fa = auto_features(a);
  auto fb = auto_features(b);
  REQUIRE(golden_a.size() == fa.size());
  REQUIRE(golden_b.size() == fb.size());
  for (std::size_t i = 0; i < fa.size(); ++i)
    REQUIRE(fa[i] == Catch::Approx(golden_a[i]).margin(1e-9));
  for (std::size_t i = 0; i < fb.size(); ++i)
    REQUIRE(fb[i] == Catch::Approx(golden_b[i]).margin(1e-9));
}

TEST_CASE("derived IMU channels follow the orientation formulas", "[features]") {
  MultivariateSeries dev;
  for (const auto& sensor : imu_sensor_channels()) {
    dev.channel_names.push_back(sensor);
    dev.values.push_back(std::vector<double>(10, 0.0));
  }
  // Gravity-aligned rest: acc = (0, 0, 1g).
  std::fill(dev.values[2].begin(), dev.values[2].end(), 1.0);
  auto out = derive_imu_channels(dev);
  REQUIRE(out.num_channels() == 14);
  REQUIRE(out.channel("pitch")[0] == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(out.channel("roll")[0] == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(out.channel("acc_mag")[0] == Catch::Approx(1.0));

  // Axis-aligned: acc = (-1g, 0, 0) puts pitch at pi/2.
  std::fill(dev.values[0].begin(), dev.values[0].end(), -1.0);
  std::fill(dev.values[2].begin(), dev.values[2].end(), 0.0);
  auto out2 = derive_imu_channels(dev);
  REQUIRE(out2.channel("pitch")[0] == Catch::Approx(kPi / 2.0));
}

TEST_CASE("vector magnitudes match the direct norm", "[features]") {
  SplitMix64 rng(55);
  MultivariateSeries dev;
  for (const auto& sensor : imu_sensor_channels()) {
    dev.channel_names.push_back(sensor);
    std::vector<double> ch(16);
    for (auto& v : ch) v = rng.next_normal();
    dev.values.push_back(std::move(ch));
  }
  auto out = derive_imu_channels(dev);
  for (std::size_t t = 0; t < 16; ++t) {
    double acc = std::sqrt(dev.values[0][t] * dev.values[0][t] +
                           dev.values[1][t] * dev.values[1][t] +
                           dev.values[2][t] * dev.values[2][t]);
    double gyro = std::sqrt(dev.values[3][t] * dev.values[3][t] +
                            dev.values[4][t] * dev.values[4][t] +
                            dev.values[5][t] * dev.values[5][t]);
    REQUIRE(out.channel("acc_mag")[t] == Catch::Approx(acc).margin(1e-12));
    REQUIRE(out.channel("gyro_mag")[t] == Catch::Approx(gyro).margin(1e-12));
  }
}

TEST_CASE("featurize_dataset produces the documented widths", "[features]") {
  Dataset imu5;
  imu5.samples = {make_imu_sample(5, 32, 1), make_imu_sample(5, 32, 2)};
  auto handcrafted = featurize_dataset(imu5, FeatureStrategy::handcrafted);
  REQUIRE(handcrafted.cols == 1260);  // 70 signals x 18 features
  REQUIRE(handcrafted.rows == 2);

  auto automatic = featurize_dataset(imu5, FeatureStrategy::automatic);
  REQUIRE(automatic.cols == 990);  // 45 signals x 22 features

  Dataset video;
  LabeledSample v;
  v.modality = Modality::video;
  v.label = "N";
  v.participant_id = "P001";
  SplitMix64 rng(9);
  for (const auto& kp : upper_body8_keypoint_names()) {
    for (const char* axis : {"_x", "_y"}) {
      v.series.channel_names.push_back(kp + axis);
      std::vector<double> ch(32);
      for (auto& val : ch) val = rng.next_normal();
      v.series.values.push_back(std::move(ch));
    }
  }
  video.samples = {v};
  auto video_auto = featurize_dataset(video, FeatureStrategy::automatic);
  REQUIRE(video_auto.cols == 352);  // 16 signals x 22 features

  try {
    featurize_dataset(video, FeatureStrategy::handcrafted);
    FAIL("expected strategy-mismatch");
  } catch (const Error& e) {
    REQUIRE(e.code() == errc::strategy_mismatch);
  }
}

TEST_CASE("feature names are unique and deterministic", "[features]") {
  Dataset imu;
  imu.samples = {make_imu_sample(2, 32, 3)};
  auto a = featurize_dataset(imu, FeatureStrategy::handcrafted);
  auto b = featurize_dataset(imu, FeatureStrategy::handcrafted);
  REQUIRE(a.column_names == b.column_names);
  std::set<std::string> unique(a.column_names.begin(), a.column_names.end());
  REQUIRE(unique.size() == a.column_names.size());
  REQUIRE(a.data == b.data);
}
