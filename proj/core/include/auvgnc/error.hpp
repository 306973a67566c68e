#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace auvgnc {

enum class ErrorCode {
  kInvalidArgument,
  kNonSkewInput,
  kGammaOutOfRange,
  kDegeneratePath,
  kNotHurwitz,
  kSingularLambda,
  kNonSpdQ,
  kSingularPhi,
  kNonProperFilter,
  kNonMinimumPhaseM,
  kUnstableFilter,
  kMismatchedRuns,
  kConfigError,
  kNumericalDivergence,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// All recoverable failures in the library are reported as auvgnc::Error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonSkewInput: return "NonSkewInput";
    case ErrorCode::kGammaOutOfRange: return "GammaOutOfRange";
    case ErrorCode::kDegeneratePath: return "DegeneratePath";
    case ErrorCode::kNotHurwitz: return "NotHurwitz";
    case ErrorCode::kSingularLambda: return "SingularLambda";
    case ErrorCode::kNonSpdQ: return "NonSPD_Q";
    case ErrorCode::kSingularPhi: return "SingularPhi";
    case ErrorCode::kNonProperFilter: return "NonProperFilter";
    case ErrorCode::kNonMinimumPhaseM: return "NonMinimumPhaseM";
    case ErrorCode::kUnstableFilter: return "UnstableFilter";
    case ErrorCode::kMismatchedRuns: return "MismatchedRuns";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kNumericalDivergence: return "NumericalDivergence";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace auvgnc
