#include "robkf/error.hpp"

namespace robkf {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularDD: return "SingularDD";
    case ErrorCode::V0NotSPD: return "V0NotSPD";
    case ErrorCode::NotReachable: return "NotReachable";
    case ErrorCode::NotObservable: return "NotObservable";
    case ErrorCode::NotSPD: return "NotSPD";
    case ErrorCode::NotOrdered: return "NotOrdered";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::ToleranceUnreachable: return "ToleranceUnreachable";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::SearchFailed: return "SearchFailed";
    case ErrorCode::RiskSensitiveModeUnsupported: return "RiskSensitiveModeUnsupported";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch:
    case ErrorCode::SingularDD:
    case ErrorCode::V0NotSPD:
    case ErrorCode::NotReachable:
    case ErrorCode::NotObservable:
    case ErrorCode::ParseError:
    case ErrorCode::IoError:
      return true;
    default:
      return false;
  }
}

}  // namespace robkf
