#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qnet {

enum class ErrorCode {
  InvalidParams,
  DimensionMismatch,
  NotStabilizable,
  NotDetectable,
  NoStabilizingSolution,
  IllConditioned,
  NotHurwitz,
  DegenerateMeasurement,
  SingularResolvent,
  NonPositive,
  NoConvergence,
  DegenerateDelay,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotStabilizable: return "NotStabilizable";
    case ErrorCode::NotDetectable: return "NotDetectable";
    case ErrorCode::NoStabilizingSolution: return "NoStabilizingSolution";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::NotHurwitz: return "NotHurwitz";
    case ErrorCode::DegenerateMeasurement: return "DegenerateMeasurement";
    case ErrorCode::SingularResolvent: return "SingularResolvent";
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateDelay: return "DegenerateDelay";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by frequency-response evaluation when iωI − ΣA e^{−iωτ} is
/// numerically singular; carries the offending frequency.
class SingularResolventError : public Error {
 public:
  SingularResolventError(double omega, const std::string& what)
      : Error(ErrorCode::SingularResolvent, what), omega_(omega) {}

  double omega() const noexcept { return omega_; }

 private:
  double omega_;
};

}  // namespace qnet
