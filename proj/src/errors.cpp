#include "spectralht/errors.hpp"

namespace stht {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch:    return "DimensionMismatch";
    case ErrorCode::BadIndex:             return "BadIndex";
    case ErrorCode::DuplicateFrequency:   return "DuplicateFrequency";
    case ErrorCode::ZeroCoefficient:      return "ZeroCoefficient";
    case ErrorCode::SeparationInfeasible: return "SeparationInfeasible";
    case ErrorCode::ZeroReference:        return "ZeroReference";
    case ErrorCode::SparsityTooLarge:     return "SparsityTooLarge";
    case ErrorCode::RankDeficient:        return "RankDeficient";
    case ErrorCode::NotOrthogonal:        return "NotOrthogonal";
    case ErrorCode::NotSymmetric:         return "NotSymmetric";
    case ErrorCode::BaseMismatch:         return "BaseMismatch";
    case ErrorCode::InvalidConfig:        return "InvalidConfig";
    case ErrorCode::ParseError:           return "ParseError";
    case ErrorCode::IoError:              return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

void raise(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace stht
