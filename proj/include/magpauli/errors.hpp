#pragma once

#include <stdexcept>
#include <string>

namespace magpauli {

// Every module error carries one of these codes; the CLI maps them to exit codes.
enum class ErrorCode : int {
  EmptySum = 10,
  GridTooSmall = 11,
  MaxSubdivisions = 12,
  NoConvergence = 13,
  SingularJacobian = 14,
  DegenerateData = 20,
  PoleHit = 21,
  ZeroOfC = 22,
  NotReal = 23,
  NotPositive = 24,
  EmptyPositivePart = 25,
  ZeroOfPsi = 26,
  UnstableClass = 30,
  DegenerateCorner = 31,
  SelfCheckFailed = 40,
  InvalidLattice = 41,
  NotZIndependent = 42,
  SingularSystem = 43,
  ValidationFailed = 44,
  ZeroOnBoundary = 45,
  ParseError = 50,
  SchemaError = 51,
  IoError = 52,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace magpauli
