#pragma once

#include <stdexcept>
#include <string>

namespace pointing {

enum class ErrorCode {
  dimension_mismatch,
  non_finite,
  invalid_argument,
  simulation_divergence,
  schema,
  degenerate,
  exhausted,
  empty_input,
  no_hold_detected,
  protocol,
  not_found,
  io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::dimension_mismatch: return "dimension mismatch";
    case ErrorCode::non_finite: return "non-finite value";
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::simulation_divergence: return "simulation divergence";
    case ErrorCode::schema: return "schema error";
    case ErrorCode::degenerate: return "degenerate input";
    case ErrorCode::exhausted: return "attempts exhausted";
    case ErrorCode::empty_input: return "empty input";
    case ErrorCode::no_hold_detected: return "no hold detected";
    case ErrorCode::protocol: return "protocol violation";
    case ErrorCode::not_found: return "not found";
    case ErrorCode::io: return "i/o error";
  }
  return "error";
}

}  // namespace pointing
