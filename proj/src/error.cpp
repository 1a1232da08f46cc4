#include "occtime/error.hpp"

namespace occtime {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::PoleEvaluation: return "PoleEvaluation";
    case ErrorCode::RootCountMismatch: return "RootCountMismatch";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DegenerateExpansion: return "DegenerateExpansion";
    case ErrorCode::OutsideAnalyticRegion: return "OutsideAnalyticRegion";
    case ErrorCode::DegenerateArguments: return "DegenerateArguments";
    case ErrorCode::ResidueExtractionFailure: return "ResidueExtractionFailure";
    case ErrorCode::OutsideStripError: return "OutsideStripError";
    case ErrorCode::RegimeContractViolation: return "RegimeContractViolation";
    case ErrorCode::InversionUnstable: return "InversionUnstable";
    case ErrorCode::ComplexRootTrackingFailed: return "ComplexRootTrackingFailed";
    case ErrorCode::UnsampleableDensity: return "UnsampleableDensity";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace occtime
