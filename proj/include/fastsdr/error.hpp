#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fastsdr {

enum class ErrorCode {
  kZeroSignal,
  kNonFiniteSample,
  kLengthMismatch,
  kRateMismatch,
  kFilterTooLong,
  kEmptyInput,
  kInvalidConfig,
  kDimensionMismatch,
  kNonPositivePreconditioner,
  kBreakdownDetected,
  kSingularSystem,
  kLevinsonBreakdown,
  kSingularGram,
  kOracleTooLarge,
  kSolverFailure,
  kIo,
  kFormat,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code.
/// `stage` names the pipeline step that failed (empty when raised directly
/// by a low-level routine).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string stage = {})
      : std::runtime_error(message), code_(code), stage_(std::move(stage)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

  /// Returns a copy with `label` prepended to the stage path.
  Error with_stage(std::string_view label) const {
    std::string s(label);
    if (!stage_.empty()) s += "/" + stage_;
    return Error(code_, what(), std::move(s));
  }

 private:
  ErrorCode code_;
  std::string stage_;
};

/// True for codes that come from the linear solvers.
bool is_solver_error(ErrorCode code);

}  // namespace fastsdr
