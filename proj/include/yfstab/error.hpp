#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace yfstab {

enum class ErrorCode {
  NonConverged,
  SmoothnessViolation,
  InsufficientN,
  OnshellVanishing,
  DegenerateMasses,
  PoleProximity,
  UnsupportedOrder,
  ConfigInvalid,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonConverged: return "NON_CONVERGED";
    case ErrorCode::SmoothnessViolation: return "SMOOTHNESS_VIOLATION";
    case ErrorCode::InsufficientN: return "INSUFFICIENT_N";
    case ErrorCode::OnshellVanishing: return "ONSHELL_VANISHING";
    case ErrorCode::DegenerateMasses: return "DEGENERATE_MASSES";
    case ErrorCode::PoleProximity: return "POLE_PROXIMITY";
    case ErrorCode::UnsupportedOrder: return "UNSUPPORTED_ORDER";
    case ErrorCode::ConfigInvalid: return "CONFIG_INVALID";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
  }
  return "UNKNOWN";
}

/// Every failure raised by the library carries one of the codes above so that
/// the CLI can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace yfstab
