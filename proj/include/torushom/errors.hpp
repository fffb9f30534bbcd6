#pragma once

#include <stdexcept>
#include <string>

namespace torushom {

enum class ErrorCode {
  Config,
  OutOfRange,
  EmptyConstraint,
  InvalidColoring,
  BudgetExceeded,
  CapExceeded,
  ZeroConditioningEvent,
  ZeroDenominator,
  NotEquipartition,
  NoValidInitial,
  OracleMismatch,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

const char* error_name(ErrorCode code) noexcept;

/// Process exit status for the CLI: 2 config/input, 3 budget, 4 oracle mismatch.
int exit_status(ErrorCode code) noexcept;

}  // namespace torushom
