#include "dsfw/error.hpp"

namespace dsfw {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::AsymmetricMatrix: return "AsymmetricMatrix";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyOverlap: return "EmptyOverlap";
    case ErrorCode::ZeroNormRow: return "ZeroNormRow";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::TooManySeeds: return "TooManySeeds";
    case ErrorCode::PoolTooSmall: return "PoolTooSmall";
    case ErrorCode::NoClusters: return "NoClusters";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::NotAscent: return "NotAscent";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::BadInit: return "BadInit";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::IdentityViolated: return "IdentityViolated";
    case ErrorCode::InvariantViolated: return "InvariantViolated";
  }
  return "Unknown";
}

bool is_numeric(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptySupport:
    case ErrorCode::NotAscent:
    case ErrorCode::ZeroDenominator:
    case ErrorCode::BadInit:
    case ErrorCode::EmptyCluster:
    case ErrorCode::IdentityViolated:
    case ErrorCode::InvariantViolated:
      return true;
    default:
      return false;
  }
}

}  // namespace dsfw
