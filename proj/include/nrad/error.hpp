#pragma once

#include <stdexcept>
#include <string>

namespace nrad {

enum class ErrorCode {
  PointwiseUndefined,
  QuadratureNonConvergent,
  InvalidArgument,
  IndexOutOfRange,
  MissingDipoleData,
  TooFewLevels,
  ParseError,
  InvariantViolation,
  ZeroWidth,
  ResonantMixedTerm,
  ResonantIntermediate,
  InadmissibleNoise,
  TrajectoryTooShort,
};

const char* to_string(ErrorCode code);

/// Exception carrying a machine-checkable error category.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::PointwiseUndefined: return "PointwiseUndefined";
    case ErrorCode::QuadratureNonConvergent: return "QuadratureNonConvergent";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::MissingDipoleData: return "MissingDipoleData";
    case ErrorCode::TooFewLevels: return "TooFewLevels";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::ZeroWidth: return "ZeroWidth";
    case ErrorCode::ResonantMixedTerm: return "ResonantMixedTerm";
    case ErrorCode::ResonantIntermediate: return "ResonantIntermediate";
    case ErrorCode::InadmissibleNoise: return "InadmissibleNoise";
    case ErrorCode::TrajectoryTooShort: return "TrajectoryTooShort";
  }
  return "Unknown";
}

}  // namespace nrad
