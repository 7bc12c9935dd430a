#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ehsched {

enum class ErrorCode {
  InvalidArgument,     // malformed instance, trace or spec
  Domain,              // rate function evaluated outside its domain
  Unsolvable,          // scalar solve has no root in range
  InsufficientHarvest, // bit target cannot be delivered from the traces
  Structural,          // malformed policy
  NumericalFailure,    // bracketing failed where a root must exist
  InternalInvariant,   // solver state inconsistent
  Io,                  // file or JSON problems
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Domain: return "domain error";
    case ErrorCode::Unsolvable: return "unsolvable";
    case ErrorCode::InsufficientHarvest: return "insufficient harvest";
    case ErrorCode::Structural: return "structural error";
    case ErrorCode::NumericalFailure: return "numerical failure";
    case ErrorCode::InternalInvariant: return "internal invariant";
    case ErrorCode::Io: return "io error";
  }
  return "error";
}

}  // namespace ehsched
