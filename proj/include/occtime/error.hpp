#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace occtime {

/// Failure categories raised by the numerical modules.
enum class ErrorCode {
  PoleEvaluation,
  RootCountMismatch,
  NonConvergence,
  DegenerateExpansion,
  OutsideAnalyticRegion,
  DegenerateArguments,
  ResidueExtractionFailure,
  OutsideStripError,
  RegimeContractViolation,
  InversionUnstable,
  ComplexRootTrackingFailed,
  UnsampleableDensity,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

class NumericalError : public std::runtime_error {
 public:
  NumericalError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace occtime
