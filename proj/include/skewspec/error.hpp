#pragma once

#include <stdexcept>
#include <string>

namespace skewspec {

enum class ErrorCode {
  DimensionMismatch,
  TagMismatch,
  InvalidElement,
  InvalidArgument,
  CommutationViolation,
  DegenerateWeights,
  ConfigError,
  NotFound,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Structured error carried by every throwing operation in the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace skewspec
