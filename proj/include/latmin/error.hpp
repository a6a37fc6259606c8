#pragma once

#include <stdexcept>
#include <string>

namespace latmin {

enum class ErrorCode {
  InvalidArgument,
  InvalidNorm,
  UnboundedBall,
  DimensionMismatch,
  EnumerationBudgetExceeded,
  Undecidable,
  InfeasibleLedger,
  PreconditionViolated,
  ParseError,
  SchemaViolation,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace latmin
