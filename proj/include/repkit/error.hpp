#pragma once

#include <stdexcept>
#include <string>

namespace repkit {

enum class errc {
  degenerate_series,
  rep_count_mismatch,
  missing_anchor,
  missing_channel,
  too_short,
  span_exceeds_input,
  shape_mismatch,
  strategy_mismatch,
  singular_system,
  dimension_mismatch,
  unknown_label,
  too_few_participants,
  malformed_input,
  frame_count_zero,
  empty_intersection,
  io_error,
  bad_config,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::degenerate_series: return "degenerate-series";
    case errc::rep_count_mismatch: return "rep-count-mismatch";
    case errc::missing_anchor: return "missing-anchor";
    case errc::missing_channel: return "missing-channel";
    case errc::too_short: return "too-short";
    case errc::span_exceeds_input: return "span-exceeds-input";
    case errc::shape_mismatch: return "shape-mismatch";
    case errc::strategy_mismatch: return "strategy-mismatch";
    case errc::singular_system: return "singular-system";
    case errc::dimension_mismatch: return "dimension-mismatch";
    case errc::unknown_label: return "unknown-label";
    case errc::too_few_participants: return "too-few-participants";
    case errc::malformed_input: return "malformed-input";
    case errc::frame_count_zero: return "frame-count-zero";
    case errc::empty_intersection: return "empty-intersection";
    case errc::io_error: return "io-error";
    case errc::bad_config: return "bad-config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace repkit
