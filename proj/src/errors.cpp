#include "etse/errors.hpp"

namespace etse {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kNotPositiveDefinite: return "not positive definite";
    case ErrorCode::kNotPositiveSemidefinite: return "not positive semidefinite";
    case ErrorCode::kOutOfRange: return "out of range";
    case ErrorCode::kHorizonCap: return "horizon cap exceeded";
    case ErrorCode::kWeightUnderflow: return "hypothesis weight underflow";
    case ErrorCode::kInvalidConfig: return "invalid configuration";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kInvalidState: return "invalid estimator state";
    case ErrorCode::kInternal: return "internal error";
  }
  return "unknown error";
}

}  // namespace etse
