#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dsfw {

enum class ErrorCode {
  // data errors
  NotSquare,
  AsymmetricMatrix,
  NegativeEntry,
  NonzeroDiagonal,
  NonFiniteEntry,
  DimensionMismatch,
  TooSmall,
  LengthMismatch,
  EmptyOverlap,
  ZeroNormRow,
  RangeError,
  TooManySeeds,
  PoolTooSmall,
  NoClusters,
  EmptyTrace,
  TooFewPoints,
  InvalidConfig,
  ParseError,
  IoError,
  // numeric / solver errors
  EmptySupport,
  NotAscent,
  ZeroDenominator,
  BadInit,
  EmptyCluster,
  IdentityViolated,
  InvariantViolated,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for failures of the numerical machinery as opposed to bad input.
bool is_numeric(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void ensure(bool cond, const char* what) {
  if (!cond) throw Error(ErrorCode::InvariantViolated, what);
}

}  // namespace dsfw
