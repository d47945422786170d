#pragma once

#include <stdexcept>
#include <string>

namespace twistnorm {

/// Stable error categories. The numeric values are part of the C ABI
/// (see twistnorm.h) and must not be renumbered.
enum class ErrorCode : int {
  ok = 0,
  precision_mismatch = 1,
  not_a_unit = 2,
  not_a_simple_root = 3,
  desk_bound_exceeded = 4,
  supersingular = 5,
  non_galois = 6,
  precision_exhausted = 7,
  singular_curve = 8,
  invalid_argument = 9,
  config_error = 10,
  io_error = 11,
  internal = 99,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::ok: return "ok";
    case ErrorCode::precision_mismatch: return "precision_mismatch";
    case ErrorCode::not_a_unit: return "not_a_unit";
    case ErrorCode::not_a_simple_root: return "not_a_simple_root";
    case ErrorCode::desk_bound_exceeded: return "desk_bound_exceeded";
    case ErrorCode::supersingular: return "supersingular";
    case ErrorCode::non_galois: return "non_galois";
    case ErrorCode::precision_exhausted: return "precision_exhausted";
    case ErrorCode::singular_curve: return "singular_curve";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::config_error: return "config_error";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace twistnorm
