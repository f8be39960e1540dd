#include "carlab/errors.hpp"

namespace carlab {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::AllZeroWeights: return "AllZeroWeights";
    case ErrorCode::ZeroProbabilityEvent: return "ZeroProbabilityEvent";
    case ErrorCode::RowNotNormalized: return "RowNotNormalized";
    case ErrorCode::UnobservableObservation: return "UnobservableObservation";
    case ErrorCode::JeffreyUndefined: return "JeffreyUndefined";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NotAbsolutelyContinuousFeasible: return "NotAbsolutelyContinuousFeasible";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::RuleKindMismatch: return "RuleKindMismatch";
    case ErrorCode::AccuracyViolation: return "AccuracyViolation";
    case ErrorCode::UncoveredWorld: return "UncoveredWorld";
    case ErrorCode::InvalidAlphas: return "InvalidAlphas";
    case ErrorCode::ConditionalOutsideCell: return "ConditionalOutsideCell";
    case ErrorCode::WrongAlphabetShape: return "WrongAlphabetShape";
    case ErrorCode::NotAPartition: return "NotAPartition";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

ErrorCategory error_category(ErrorCode code) {
  switch (code) {
    case ErrorCode::AllZeroWeights:
    case ErrorCode::ZeroProbabilityEvent:
    case ErrorCode::UnobservableObservation:
    case ErrorCode::JeffreyUndefined:
    case ErrorCode::Infeasible:
    case ErrorCode::NotAbsolutelyContinuousFeasible:
    case ErrorCode::AccuracyViolation:
    case ErrorCode::UncoveredWorld:
    case ErrorCode::Internal:
      return ErrorCategory::Mathematical;
    case ErrorCode::NoConvergence:
      return ErrorCategory::Convergence;
    default:
      return ErrorCategory::Usage;
  }
}

}  // namespace carlab
