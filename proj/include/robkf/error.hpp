#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace robkf {

enum class ErrorCode {
  DimensionMismatch,
  SingularDD,
  V0NotSPD,
  NotReachable,
  NotObservable,
  NotSPD,
  NotOrdered,
  DomainViolation,
  ToleranceUnreachable,
  NonConvergence,
  MaxIterExceeded,
  SearchFailed,
  RiskSensitiveModeUnsupported,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors caused by the input model or files rather than by the
/// numerics (the CLI maps these to exit code 2).
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace robkf
