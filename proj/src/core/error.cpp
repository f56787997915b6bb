#include "gprlab/core/error.hpp"

namespace gprlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::shape_mismatch: return "shape mismatch";
    case ErrorCode::non_finite: return "non-finite value";
    case ErrorCode::missing_sample: return "missing sample";
    case ErrorCode::unknown_version: return "unknown version";
    case ErrorCode::io_error: return "i/o error";
    case ErrorCode::parse_error: return "parse error";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::target_invisible: return "target invisible";
    case ErrorCode::courant_violation: return "courant violation";
    case ErrorCode::numerical_abort: return "numerical abort";
    case ErrorCode::leakage: return "test-set leakage";
    case ErrorCode::config_error: return "config error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace gprlab
