#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dsfw/matrix.hpp"

namespace dsfw {

enum class SolverKind { FW, PFW, AFW, RD };
enum class InitKind { Barycenter, Vertex, Custom };

std::string_view to_string(SolverKind k) noexcept;

enum class StepKind { FwGood, AwayGood, PairwiseGood, Drop, Swap, RdStep };

std::string_view to_string(StepKind k) noexcept;
std::optional<StepKind> step_kind_from_string(std::string_view s) noexcept;

inline bool is_good(StepKind k) noexcept {
  return k == StepKind::FwGood || k == StepKind::AwayGood || k == StepKind::PairwiseGood;
}

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

struct StepRecord {
  std::size_t t = 0;
  StepKind kind = StepKind::FwGood;
  double gamma = 0.0;
  double gamma_max = 0.0;
  /// Full Frank-Wolfe gap 2 (r_i - f) at the iterate the step started from.
  double gap = 0.0;
  /// r_i - f, the quantity compared against epsilon.
  double gap_half = 0.0;
  double f_before = 0.0;
  double f_after = 0.0;
  /// r at the FW vertex and at the away vertex, plus a_sv, before the step.
  double r_s = 0.0;
  double r_v = 0.0;
  double a_sv = 0.0;
  std::size_t s_index = kNoIndex;
  std::size_t v_index = kNoIndex;
  std::size_t support_before = 0;
  std::size_t support_after = 0;
  double step_norm = 0.0;
};

struct SolverConfig {
  /// Machine epsilon, the threshold used throughout the experiments.
  double epsilon = std::numeric_limits<double>::epsilon();
  std::size_t max_iters = 1000;
  SolverKind kind = SolverKind::FW;
  InitKind init = InitKind::Vertex;
  std::optional<SimplexPoint> custom_start;
  /// Record wall-clock time of each iteration in RunResult::iteration_ns.
  bool time_iterations = false;

  void validate() const;
};

/// Iterate with cached r = A x and f = x^T A x.
class SolverState {
 public:
  /// Computes r and f densely.
  SolverState(const SimilarityMatrix& a, SimplexPoint x);

  const SimplexPoint& x() const noexcept { return x_; }
  std::span<const double> r() const noexcept { return r_; }
  double f() const noexcept { return f_; }
  std::size_t t() const noexcept { return t_; }
  std::size_t dim() const noexcept { return x_.dim(); }

  // Test hook: lets diagnostics tests plant an inconsistent cache.
  std::vector<double>& mutable_r_for_testing() { return r_; }

 private:
  friend StepRecord fw_step(SolverState&, const SimilarityMatrix&);
  friend StepRecord pfw_step(SolverState&, const SimilarityMatrix&);
  friend StepRecord afw_step(SolverState&, const SimilarityMatrix&);
  friend StepRecord rd_step(SolverState&, const SimilarityMatrix&);

  void fix_drift(double sum);

  SimplexPoint x_;
  std::vector<double> r_;
  double f_ = 0.0;
  std::size_t t_ = 0;
};

SimplexPoint init_barycenter(std::size_t n);
/// e_i for the row of A with the largest sum (lowest index on ties).
SimplexPoint init_vertex(const SimilarityMatrix& a);

struct GapInfo {
  double gap = 0.0;       // 2 (r_i - f)
  double gap_half = 0.0;  // r_i - f
  std::size_t s_index = 0;
};

GapInfo fw_gap(std::span<const double> r, double f);
GapInfo fw_gap(const SolverState& state);

/// Support index minimizing r (lowest index on ties).
std::size_t select_away(const SimplexPoint& x, std::span<const double> r);
std::size_t select_away(const SolverState& state);

/// One iteration of each method. All four require a positive halved gap
/// (NotAscent otherwise) and update x, r, f in place.
StepRecord fw_step(SolverState& state, const SimilarityMatrix& a);
StepRecord pfw_step(SolverState& state, const SimilarityMatrix& a);
StepRecord afw_step(SolverState& state, const SimilarityMatrix& a);
/// Replicator update; recomputes r and f densely. Throws ZeroDenominator if f == 0.
StepRecord rd_step(SolverState& state, const SimilarityMatrix& a);

enum class StopReason { GapReached, IterateConverged, MaxIters };

std::string_view to_string(StopReason r) noexcept;

struct RunResult {
  SimplexPoint x;
  double f = 0.0;
  double f0 = 0.0;
  std::size_t support0 = 0;
  std::vector<StepRecord> trace;
  StopReason stop = StopReason::MaxIters;
  /// Halved gap at the returned iterate.
  double final_gap_half = 0.0;
  std::vector<double> iteration_ns;
};

using StepObserver = std::function<void(const SolverState&, const StepRecord&)>;

SimplexPoint make_start(const SimilarityMatrix& a, const SolverConfig& config);

/// Runs the configured method until the halved gap drops to epsilon, two
/// consecutive iterates are within epsilon, or max_iters steps were taken.
RunResult run(const SimilarityMatrix& a, const SolverConfig& config,
              const StepObserver& observer = {});

}  // namespace dsfw
