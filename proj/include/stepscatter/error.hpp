#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stepscatter {

enum class ErrorCode {
  InvalidArgument,
  NonPositiveWavenumber,
  DegenerateEnergy,
  WrongRegime,
  NoZeroFound,
  QuadratureNotConverged,
  SpectralGuardViolated,
  EmptyChannel,
  GridTooSmall,
  BadFitWindow,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonPositiveWavenumber: return "NonPositiveWavenumber";
    case ErrorCode::DegenerateEnergy: return "DegenerateEnergy";
    case ErrorCode::WrongRegime: return "WrongRegime";
    case ErrorCode::NoZeroFound: return "NoZeroFound";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::SpectralGuardViolated: return "SpectralGuardViolated";
    case ErrorCode::EmptyChannel: return "EmptyChannel";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::BadFitWindow: return "BadFitWindow";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class ScatterError : public std::runtime_error {
 public:
  ScatterError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw ScatterError(code, what);
}

}  // namespace stepscatter
