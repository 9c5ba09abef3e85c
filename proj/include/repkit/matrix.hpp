#pragma once

#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "repkit/error.hpp"

namespace repkit {

/// Dense row-major feature matrix with named columns.
struct FeatureMatrix {
  std::vector<std::string> column_names;
  std::vector<double> data;  // rows * cols, row-major
  std::size_t rows = 0;
  std::size_t cols = 0;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c) : data(r * c, 0.0), rows(r), cols(c) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
};

/// CSV export with a header row of feature names. Values use %.17g so a
/// re-import reproduces them exactly.
inline void write_csv(const FeatureMatrix& m, const std::filesystem::path& path,
                      const std::vector<std::string>& leading_names = {},
                      const std::vector<std::vector<std::string>>& leading_cols = {}) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot open '" + path.string() + "' for writing");
  for (std::size_t i = 0; i < leading_names.size(); ++i) {
    if (i) out << ',';
    out << leading_names[i];
  }
  for (std::size_t c = 0; c < m.cols; ++c) {
    if (c || !leading_names.empty()) out << ',';
    out << (c < m.column_names.size() ? m.column_names[c] : "c" + std::to_string(c));
  }
  out << '\n';
  char buf[40];
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t i = 0; i < leading_cols.size(); ++i) {
      if (i) out << ',';
      out << leading_cols[i][r];
    }
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (c || !leading_cols.empty()) out << ',';
      std::snprintf(buf, sizeof buf, "%.17g", m.at(r, c));
      out << buf;
    }
    out << '\n';
  }
  if (!out) fail(errc::io_error, "failed writing '" + path.string() + "'");
}

}  // namespace repkit
