#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace carlab {

enum class ErrorCode {
  AllZeroWeights,
  ZeroProbabilityEvent,
  RowNotNormalized,
  UnobservableObservation,
  JeffreyUndefined,
  Infeasible,
  NotAbsolutelyContinuousFeasible,
  NoConvergence,
  RuleKindMismatch,
  AccuracyViolation,
  UncoveredWorld,
  InvalidAlphas,
  ConditionalOutsideCell,
  WrongAlphabetShape,
  NotAPartition,
  ParseError,
  ValidationError,
  InvalidArgument,
  Internal,
};

/// How a failure should be surfaced by front ends (maps onto CLI exit codes).
enum class ErrorCategory { Usage = 1, Mathematical = 2, Convergence = 3 };

std::string_view error_name(ErrorCode code);
ErrorCategory error_category(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return error_category(code_); }

 private:
  ErrorCode code_;
};

}  // namespace carlab
