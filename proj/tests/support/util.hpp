#pragma once

#include <span>
#include <vector>

#include "dsfw/error.hpp"

inline std::vector<double> as_vec(std::span<const double> s) { return {s.begin(), s.end()}; }
inline std::vector<double> as_vec(std::vector<double> v) { return v; }

template <class F>
dsfw::ErrorCode code_of(F&& fn) {
  try {
    fn();
  } catch (const dsfw::Error& e) {
    return e.code();
  }
  return dsfw::ErrorCode::InvariantViolated;  // sentinel: nothing thrown
}
