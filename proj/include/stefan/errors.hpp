#pragma once

#include <stdexcept>
#include <string>

namespace stefan {

// Failure taxonomy for the whole suite.  Codes map onto the CLI exit status:
// model/config rejection -> 1, iterative-solver breakdown -> 2, filesystem -> 3.
enum class ErrorCode {
  NotNormalized,
  NegativeDensity,
  SupercriticalSupNorm,
  NonPositiveEpsilon,
  GridMismatch,
  CFLUnreasonable,
  PreconditionLipschitz,
  PreconditionFailed,
  WindowStalled,
  NotConverged,
  ConfigParse,
  Io,
};

constexpr const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::NegativeDensity: return "NegativeDensity";
    case ErrorCode::SupercriticalSupNorm: return "SupercriticalSupNorm";
    case ErrorCode::NonPositiveEpsilon: return "NonPositiveEpsilon";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::CFLUnreasonable: return "CFLUnreasonable";
    case ErrorCode::PreconditionLipschitz: return "PreconditionLipschitz";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::WindowStalled: return "WindowStalled";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

constexpr int exit_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::WindowStalled:
    case ErrorCode::NotConverged:
      return 2;
    case ErrorCode::Io:
      return 3;
    default:
      return 1;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace stefan
