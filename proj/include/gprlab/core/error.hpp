#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gprlab {

/// Categories of failure. Callers that need to branch on the cause (the CLI
/// maps some of these to exit codes) switch on the code rather than parsing
/// the message.
enum class ErrorCode {
  invalid_argument,
  shape_mismatch,
  non_finite,
  missing_sample,
  unknown_version,
  io_error,
  parse_error,
  infeasible,
  target_invisible,
  courant_violation,
  numerical_abort,
  leakage,
  config_error,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace gprlab
