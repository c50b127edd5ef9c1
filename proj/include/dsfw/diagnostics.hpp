#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dsfw/matrix.hpp"
#include "dsfw/solver.hpp"

namespace dsfw {

struct StateReport {
  double r_deviation = 0.0;  // max |r - A x|
  double f_deviation = 0.0;  // |f - x^T A x|
  double f_dense = 0.0;

  /// |r - A x|_inf <= tol and |f - x^T A x| <= tol * max(1, f).
  bool consistent(double tol = 1e-8) const;
};

StateReport check_state(const SolverState& state, const SimilarityMatrix& a);

struct Violation {
  std::size_t t = 0;
  StepKind kind = StepKind::FwGood;
  std::string what;
  double observed = 0.0;
  double predicted = 0.0;
};

struct ProgressReport {
  std::size_t checked = 0;  // good steps whose identity was evaluated
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

struct ProgressOptions {
  double rel_tol = 1e-9;
  /// Multiples of machine epsilon times the magnitudes involved in a step.
  /// f_after - f_before loses every digit below eps * f to cancellation, so
  /// a tiny step can never match its predicted gain more closely than that.
  double rounding_ulps = 32.0;
  /// Throw IdentityViolated on the first violation instead of collecting.
  bool strict = false;
};

/// Verifies the closed-form objective gain of every good step, the gap vs.
/// progress inequality for its direction, and that f never decreases.
ProgressReport check_progress(std::span<const StepRecord> trace, const OffDiagExtremes& ext,
                              const ProgressOptions& opt = {});

struct BoundReport {
  std::size_t t = 0;
  double min_gap = 0.0;
  double bound_value = 0.0;
  bool satisfied = false;
  /// Set when the right-hand side exceeds 2 M-bar, the largest possible gap.
  bool trivial = false;
  double beta = 0.0;
  std::size_t good_steps = 0;
  std::size_t drop_steps = 0;
  std::size_t swap_steps = 0;
  std::size_t support0 = 0;
  double f0 = 0.0;
  double ft = 0.0;
  /// AFW only: drop_steps <= (support0 - 1 + t) / 2.
  bool drop_bound_ok = true;
};

/// Smallest full gap in the trace (and at the final iterate, if given).
double min_gap(std::span<const StepRecord> trace, std::optional<double> final_gap = {});

/// Evaluates the convergence bound matching `kind` using f_t - f_0 from the
/// trace. `n` is the problem dimension (enters the pairwise bound as n!).
BoundReport theorem_bound(std::span<const StepRecord> trace, SolverKind kind,
                          const OffDiagExtremes& ext, std::size_t support0, std::size_t n,
                          std::optional<double> final_gap = {});

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  bool consistent = false;  // slope <= -0.4
};

/// Least-squares slope of log g vs log t over points with t >= 1 and g > 0.
DecayFit decay_fit(std::span<const double> t, std::span<const double> g);

/// Running minimum of the full gaps, one entry per step.
std::vector<double> min_gap_curve(std::span<const StepRecord> trace);

}  // namespace dsfw
