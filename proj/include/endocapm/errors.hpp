#pragma once

#include <stdexcept>
#include <string>

namespace endocapm {

enum class ErrorCode {
  NegativeWeight,
  WeightsNotNormalized,
  BetaConstraintViolated,
  NonFiniteInput,
  LengthMismatch,
  RankDeficiencyBeyondOne,
  SingularGram,
  ZeroBetaVector,
  UndefinedForSingleAsset,
  InfeasibleBounds,
  PerturbationInfeasible,
  NoFeasibleStart,
  ConfigError,
};

const char* error_code_name(ErrorCode code);

/// Library-wide exception. The message always starts with the error code
/// name so callers (and the CLI) can surface the violated constraint.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Input/constraint violations map to CLI exit 2, numerical failures to 3.
  bool is_validation() const noexcept {
    switch (code_) {
      case ErrorCode::NegativeWeight:
      case ErrorCode::WeightsNotNormalized:
      case ErrorCode::BetaConstraintViolated:
      case ErrorCode::NonFiniteInput:
      case ErrorCode::LengthMismatch:
      case ErrorCode::UndefinedForSingleAsset:
      case ErrorCode::InfeasibleBounds:
      case ErrorCode::ConfigError:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorCode code_;
};

}  // namespace endocapm
