#pragma once

#include <stdexcept>
#include <string>

namespace etse {

enum class ErrorCode {
  kInvalidArgument = 1,
  kDimensionMismatch,
  kNotPositiveDefinite,
  kNotPositiveSemidefinite,
  kOutOfRange,
  kHorizonCap,
  kWeightUnderflow,
  kInvalidConfig,
  kIo,
  kInvalidState,
  kInternal,
};

/// Every failure raised by the library carries one of the codes above; the C
/// API maps them one-to-one onto etse_status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

const char* to_string(ErrorCode code) noexcept;

}  // namespace etse
