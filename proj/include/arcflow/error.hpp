#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace arcflow {

enum class ErrorCode {
  SamplerError,
  CurveEscaped,
  PointEscaped,
  InsufficientData,
  SpaceMismatch,
  NoConvergence,
  GridMismatch,
  WeightOverflow,
  SurfaceDegenerate,
  InvalidArgument,
  ParseError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SamplerError: return "SAMPLER_ERROR";
    case ErrorCode::CurveEscaped: return "CURVE_ESCAPED";
    case ErrorCode::PointEscaped: return "POINT_ESCAPED";
    case ErrorCode::InsufficientData: return "INSUFFICIENT_DATA";
    case ErrorCode::SpaceMismatch: return "SPACE_MISMATCH";
    case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
    case ErrorCode::GridMismatch: return "GRID_MISMATCH";
    case ErrorCode::WeightOverflow: return "WEIGHT_OVERFLOW";
    case ErrorCode::SurfaceDegenerate: return "SURFACE_DEGENERATE";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::ParseError: return "PARSE_ERROR";
  }
  return "UNKNOWN";
}

/// Library-wide exception. `index` carries a step or sample position when
/// the failure is tied to one (escaped curve index, partial Euler step count).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace arcflow
