#include "torushom/errors.hpp"

namespace torushom {

const char* error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::EmptyConstraint: return "EmptyConstraint";
    case ErrorCode::InvalidColoring: return "InvalidColoring";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::ZeroConditioningEvent: return "ZeroConditioningEvent";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::NotEquipartition: return "NotEquipartition";
    case ErrorCode::NoValidInitial: return "NoValidInitial";
    case ErrorCode::OracleMismatch: return "OracleMismatch";
  }
  return "Error";
}

int exit_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BudgetExceeded:
    case ErrorCode::CapExceeded: return 3;
    case ErrorCode::OracleMismatch: return 4;
    default: return 2;
  }
}

}  // namespace torushom
