#pragma once

#include <stdexcept>
#include <string>

namespace matsl {

enum class ErrorCode {
  Ok = 0,
  InvalidArgument,
  ParseError,
  DimensionMismatch,
  UnsupportedVersion,
  IoError,
  NonFiniteState,
  NearSingular,
  CountMismatch,
  NoConvergence,
  AssumptionOneViolated,
  ContourCollision,
  TruncationTooLarge,
  MainEquationSingular,
  GridMismatch,
  Internal,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(error_code_name(code)) + ": " + what);
}

}  // namespace matsl
