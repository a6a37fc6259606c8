#include "latmin/error.hpp"

namespace latmin {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidNorm: return "InvalidNorm";
    case ErrorCode::UnboundedBall: return "UnboundedBall";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EnumerationBudgetExceeded: return "EnumerationBudgetExceeded";
    case ErrorCode::Undecidable: return "Undecidable";
    case ErrorCode::InfeasibleLedger: return "InfeasibleLedger";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
  }
  return "Unknown";
}

}  // namespace latmin
