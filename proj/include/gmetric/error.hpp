#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gmetric {

enum class ErrorCode {
  dimension_mismatch,
  non_finite,
  empty_sample_set,
  sequence_too_short,
  empty_region,
  bad_weights,
  no_admissible_configurations,
  all_samples_degenerate,
  inverse_unavailable,
  inverse_solve_failed,
  region_violation,
  orbit_too_short,
  max_steps_exceeded,
  syntax_error,
  division_by_zero,
  unbound_region_label,
  parse_error,
  validation_error,
  invalid_argument,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::non_finite: return "NonFinite";
    case ErrorCode::empty_sample_set: return "EmptySampleSet";
    case ErrorCode::sequence_too_short: return "SequenceTooShort";
    case ErrorCode::empty_region: return "EmptyRegion";
    case ErrorCode::bad_weights: return "BadWeights";
    case ErrorCode::no_admissible_configurations: return "NoAdmissibleConfigurations";
    case ErrorCode::all_samples_degenerate: return "AllSamplesDegenerate";
    case ErrorCode::inverse_unavailable: return "InverseUnavailable";
    case ErrorCode::inverse_solve_failed: return "InverseSolveFailed";
    case ErrorCode::region_violation: return "RegionViolation";
    case ErrorCode::orbit_too_short: return "OrbitTooShort";
    case ErrorCode::max_steps_exceeded: return "MaxStepsExceeded";
    case ErrorCode::syntax_error: return "SyntaxError";
    case ErrorCode::division_by_zero: return "DivisionByZero";
    case ErrorCode::unbound_region_label: return "UnboundRegionLabel";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::validation_error: return "ValidationError";
    case ErrorCode::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library. The code identifies the failure
/// class; the message carries the details.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the expression parser. `offset` is a byte offset into the
/// source text; `expected` lists the tokens that would have been accepted.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& what)
      : Error(ErrorCode::syntax_error, what + " at offset " + std::to_string(offset)),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

}  // namespace gmetric
