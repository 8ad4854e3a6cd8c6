#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace escrate {

enum class ErrorCode {
  InvalidInput,
  StateCapExceeded,
  EnumerationCapExceeded,
  NotMixingAfterRestriction,
  NoConvergence,
  InsufficientDigits,
  DepthMismatch,
  NotInRepeller,
  DepthCapExceeded,
  NoRoot,
  InsufficientTail,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Configuration-level errors map to CLI exit code 2, everything else to 3.
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

}  // namespace escrate
