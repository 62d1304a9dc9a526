#include "fastsdr/error.hpp"

namespace fastsdr {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kZeroSignal: return "ZeroSignal";
    case ErrorCode::kNonFiniteSample: return "NonFiniteSample";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kRateMismatch: return "RateMismatch";
    case ErrorCode::kFilterTooLong: return "FilterTooLong";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonPositivePreconditioner: return "NonPositivePreconditioner";
    case ErrorCode::kBreakdownDetected: return "BreakdownDetected";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kLevinsonBreakdown: return "LevinsonBreakdown";
    case ErrorCode::kSingularGram: return "SingularGram";
    case ErrorCode::kOracleTooLarge: return "OracleTooLarge";
    case ErrorCode::kSolverFailure: return "SolverFailure";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kFormat: return "FormatError";
  }
  return "Unknown";
}

bool is_solver_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonPositivePreconditioner:
    case ErrorCode::kBreakdownDetected:
    case ErrorCode::kSingularSystem:
    case ErrorCode::kLevinsonBreakdown:
    case ErrorCode::kSolverFailure:
      return true;
    default:
      return false;
  }
}

}  // namespace fastsdr
