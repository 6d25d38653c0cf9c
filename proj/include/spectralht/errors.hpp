#pragma once

#include <stdexcept>
#include <string>

namespace stht {

/// Failure categories shared by the C++ and C interfaces.
enum class ErrorCode {
  DimensionMismatch,
  BadIndex,
  DuplicateFrequency,
  ZeroCoefficient,
  SeparationInfeasible,
  ZeroReference,
  SparsityTooLarge,
  RankDeficient,
  NotOrthogonal,
  NotSymmetric,
  BaseMismatch,
  InvalidConfig,
  ParseError,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

}  // namespace stht
