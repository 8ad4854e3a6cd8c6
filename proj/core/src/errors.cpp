#include "escrate/errors.hpp"

namespace escrate {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::StateCapExceeded: return "StateCapExceeded";
    case ErrorCode::EnumerationCapExceeded: return "EnumerationCapExceeded";
    case ErrorCode::NotMixingAfterRestriction: return "NotMixingAfterRestriction";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InsufficientDigits: return "InsufficientDigits";
    case ErrorCode::DepthMismatch: return "DepthMismatch";
    case ErrorCode::NotInRepeller: return "NotInRepeller";
    case ErrorCode::DepthCapExceeded: return "DepthCapExceeded";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::InsufficientTail: return "InsufficientTail";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) noexcept {
  return code == ErrorCode::InvalidInput || code == ErrorCode::InsufficientDigits ||
         code == ErrorCode::DepthMismatch || code == ErrorCode::NotInRepeller;
}

void raise(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(to_string(code)) + ": " + message);
}

}  // namespace escrate
