#include "dsfw/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "dsfw/error.hpp"

namespace dsfw {

namespace {

// A line-search optimum this close (relatively) to the feasible cap is treated
// as hitting the cap, so the vacated coordinate becomes exactly zero instead of
// a rounding residue.
constexpr double kSnap = 1e-12;

constexpr const char* kRdVertexExplanation =
    "replicator dynamics needs x^T A x > 0 at its starting point; with a zero "
    "diagonal every vertex (and any point whose support has no internal "
    "similarity) gives x^T A x = 0, so the update denominator vanishes. Start "
    "replicator dynamics from the barycenter instead";

}  // namespace

std::string_view to_string(SolverKind k) noexcept {
  switch (k) {
    case SolverKind::FW: return "FW";
    case SolverKind::PFW: return "PFW";
    case SolverKind::AFW: return "AFW";
    case SolverKind::RD: return "RD";
  }
  return "?";
}

std::string_view to_string(StepKind k) noexcept {
  switch (k) {
    case StepKind::FwGood: return "FwGood";
    case StepKind::AwayGood: return "AwayGood";
    case StepKind::PairwiseGood: return "PairwiseGood";
    case StepKind::Drop: return "Drop";
    case StepKind::Swap: return "Swap";
    case StepKind::RdStep: return "RdStep";
  }
  return "?";
}

std::optional<StepKind> step_kind_from_string(std::string_view s) noexcept {
  for (StepKind k : {StepKind::FwGood, StepKind::AwayGood, StepKind::PairwiseGood,
                     StepKind::Drop, StepKind::Swap, StepKind::RdStep}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string_view to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::GapReached: return "GapReached";
    case StopReason::IterateConverged: return "IterateConverged";
    case StopReason::MaxIters: return "MaxIters";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (!(epsilon > 0.0)) fail(ErrorCode::InvalidConfig, "epsilon must be positive");
  if (init == InitKind::Custom && !custom_start)
    fail(ErrorCode::InvalidConfig, "custom init requires a starting point");
}

SolverState::SolverState(const SimilarityMatrix& a, SimplexPoint x) : x_(std::move(x)) {
  if (x_.dim() != a.size()) {
    fail(ErrorCode::DimensionMismatch, "starting point has dimension " +
                                           std::to_string(x_.dim()) + ", matrix is " +
                                           std::to_string(a.size()));
  }
  r_ = matvec(a, x_);
  f_ = 0.0;
  for (std::size_t i = 0; i < r_.size(); ++i) f_ += r_[i] * x_[i];
}

void SolverState::fix_drift(double sum) {
  if (std::abs(sum - 1.0) <= SimplexPoint::kSumTol) return;
  x_.rescale(sum);
  for (double& v : r_) v /= sum;
  f_ /= sum * sum;
}

SimplexPoint init_barycenter(std::size_t n) { return SimplexPoint::barycenter(n); }

SimplexPoint init_vertex(const SimilarityMatrix& a) {
  const auto sums = a.row_sums();
  if (sums.empty()) fail(ErrorCode::TooSmall, "empty matrix");
  std::size_t best = 0;
  for (std::size_t i = 1; i < sums.size(); ++i)
    if (sums[i] > sums[best]) best = i;
  return SimplexPoint::vertex(sums.size(), best);
}

GapInfo fw_gap(std::span<const double> r, double f) {
  if (r.empty()) fail(ErrorCode::TooSmall, "empty gradient");
  std::size_t best = 0;
  for (std::size_t k = 1; k < r.size(); ++k)
    if (r[k] > r[best]) best = k;
  const double half = r[best] - f;
  return {2.0 * half, half, best};
}

GapInfo fw_gap(const SolverState& state) { return fw_gap(state.r(), state.f()); }

std::size_t select_away(const SimplexPoint& x, std::span<const double> r) {
  if (x.support_size() == 0) fail(ErrorCode::EmptySupport, "support is empty");
  std::size_t best = kNoIndex;
  for (std::size_t k = 0; k < x.dim(); ++k) {
    if (!x.in_support(k)) continue;
    if (best == kNoIndex || r[k] < r[best]) best = k;
  }
  return best;
}

std::size_t select_away(const SolverState& state) {
  return select_away(state.x(), state.r());
}

namespace {

StepRecord begin_record(const SolverState& s, const GapInfo& g) {
  StepRecord rec;
  rec.t = s.t();
  rec.gap = g.gap;
  rec.gap_half = g.gap_half;
  rec.f_before = s.f();
  rec.s_index = g.s_index;
  rec.r_s = s.r()[g.s_index];
  rec.support_before = s.x().support_size();
  return rec;
}

GapInfo require_ascent(const SolverState& s) {
  const GapInfo g = fw_gap(s);
  if (!(g.gap_half > 0.0)) {
    fail(ErrorCode::NotAscent, "halved Frank-Wolfe gap is " + std::to_string(g.gap_half) +
                                   "; the iterate is stationary");
  }
  return g;
}

}  // namespace

// Shared by the FW method and the FW branch of AFW.
static void apply_fw_direction(SimplexPoint& x, std::vector<double>& r, double& f,
                               const SimilarityMatrix& a, std::size_t i,
                               StepRecord& rec, double& sum_out) {
  const double ri = r[i];
  ensure(f - 2.0 * ri <= 0.0, "FW direction curvature must be nonpositive");
  const double gamma = (ri - f) / (2.0 * ri - f);
  ensure(gamma > 0.0 && gamma < 1.0, "FW step size must lie in (0, 1)");

  const auto d = x.toward_vertex(i, gamma);
  const auto col = a.column(i);
  const double keep = 1.0 - gamma;
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = keep * r[k] + gamma * col[k];
  f = keep * keep * f + 2.0 * gamma * keep * ri;

  rec.kind = StepKind::FwGood;
  rec.gamma = gamma;
  rec.gamma_max = 1.0;
  rec.step_norm = std::sqrt(d.sq_norm);
  sum_out = d.sum;
}

StepRecord fw_step(SolverState& s, const SimilarityMatrix& a) {
  const GapInfo g = require_ascent(s);
  StepRecord rec = begin_record(s, g);
  double sum = 1.0;
  apply_fw_direction(s.x_, s.r_, s.f_, a, g.s_index, rec, sum);
  s.fix_drift(sum);
  rec.f_after = s.f_;
  rec.support_after = s.x_.support_size();
  ++s.t_;
  return rec;
}

StepRecord pfw_step(SolverState& s, const SimilarityMatrix& a) {
  const GapInfo g = require_ascent(s);
  const std::size_t i = g.s_index;
  const std::size_t j = select_away(s);
  if (i == j) fail(ErrorCode::NotAscent, "pairwise direction vanishes (s == v)");

  StepRecord rec = begin_record(s, g);
  const double ri = s.r_[i];
  const double rj = s.r_[j];
  const double aij = a(i, j);
  rec.v_index = j;
  rec.r_v = rj;
  rec.a_sv = aij;
  ensure(-2.0 * aij <= 0.0, "pairwise direction curvature must be nonpositive");

  const double gamma_max = s.x_[j];
  double gamma = gamma_max;
  bool truncated = true;
  if (aij > 0.0) {
    const double opt = (ri - rj) / (2.0 * aij);
    if (opt < gamma_max * (1.0 - kSnap)) {
      gamma = opt;
      truncated = false;
    }
  }
  const bool i_was_in = s.x_.in_support(i);

  const auto d = s.x_.transfer(j, i, gamma, truncated);
  const auto ci = a.column(i);
  const auto cj = a.column(j);
  for (std::size_t k = 0; k < s.r_.size(); ++k) s.r_[k] += gamma * (ci[k] - cj[k]);
  s.f_ = s.f_ + 2.0 * gamma * (ri - rj) - 2.0 * gamma * gamma * aij;
  s.fix_drift(d.sum);

  rec.gamma = gamma;
  rec.gamma_max = gamma_max;
  rec.kind = !truncated ? StepKind::PairwiseGood : (i_was_in ? StepKind::Drop : StepKind::Swap);
  rec.step_norm = std::sqrt(d.sq_norm);
  rec.f_after = s.f_;
  rec.support_after = s.x_.support_size();
  ++s.t_;
  return rec;
}

StepRecord afw_step(SolverState& s, const SimilarityMatrix& a) {
  const GapInfo g = require_ascent(s);
  const std::size_t i = g.s_index;
  const std::size_t j = select_away(s);

  StepRecord rec = begin_record(s, g);
  const double f = s.f_;
  const double ri = s.r_[i];
  const double rj = s.r_[j];
  rec.v_index = j;
  rec.r_v = rj;
  rec.a_sv = a(i, j);

  if (ri - f >= f - rj) {
    double sum = 1.0;
    apply_fw_direction(s.x_, s.r_, s.f_, a, i, rec, sum);
    s.fix_drift(sum);
  } else {
    const double xj = s.x_[j];
    // x = e_j means f = r_j = 0, which always takes the FW branch.
    ensure(xj < 1.0, "away step from a vertex");
    const double gamma_max = xj / (1.0 - xj);
    double gamma = gamma_max;
    bool truncated = true;
    const double denom = 2.0 * rj - f;
    if (denom > 0.0) {
      const double opt = (f - rj) / denom;
      if (opt < gamma_max * (1.0 - kSnap) && xj - opt * (1.0 - xj) > 0.0) {
        gamma = opt;
        truncated = false;
      }
    }
    const auto d = s.x_.away_from_vertex(j, gamma, truncated);
    const auto cj = a.column(j);
    const double grow = 1.0 + gamma;
    for (std::size_t k = 0; k < s.r_.size(); ++k) s.r_[k] = grow * s.r_[k] - gamma * cj[k];
    s.f_ = grow * grow * f - 2.0 * gamma * grow * rj;
    s.fix_drift(d.sum);

    rec.kind = truncated ? StepKind::Drop : StepKind::AwayGood;
    rec.gamma = gamma;
    rec.gamma_max = gamma_max;
    rec.step_norm = std::sqrt(d.sq_norm);
  }
  rec.f_after = s.f_;
  rec.support_after = s.x_.support_size();
  ++s.t_;
  return rec;
}

StepRecord rd_step(SolverState& s, const SimilarityMatrix& a) {
  if (!(s.f_ > 0.0)) fail(ErrorCode::ZeroDenominator, kRdVertexExplanation);
  const GapInfo g = fw_gap(s);
  StepRecord rec = begin_record(s, g);
  rec.kind = StepKind::RdStep;

  const auto d = s.x_.replicator(s.r_, s.f_);
  if (std::abs(d.sum - 1.0) > SimplexPoint::kSumTol) s.x_.rescale(d.sum);
  s.r_ = matvec(a, s.x_);
  double f = 0.0;
  for (std::size_t k = 0; k < s.r_.size(); ++k) f += s.r_[k] * s.x_[k];
  s.f_ = f;

  rec.step_norm = std::sqrt(d.sq_norm);
  rec.f_after = s.f_;
  rec.support_after = s.x_.support_size();
  ++s.t_;
  return rec;
}

SimplexPoint make_start(const SimilarityMatrix& a, const SolverConfig& config) {
  switch (config.init) {
    case InitKind::Barycenter: return init_barycenter(a.size());
    case InitKind::Vertex: return init_vertex(a);
    case InitKind::Custom:
      if (!config.custom_start) fail(ErrorCode::InvalidConfig, "missing custom start");
      return *config.custom_start;
  }
  fail(ErrorCode::InvalidConfig, "unknown init kind");
}

RunResult run(const SimilarityMatrix& a, const SolverConfig& config,
              const StepObserver& observer) {
  config.validate();
  SolverState state(a, make_start(a, config));
  if (config.kind == SolverKind::RD && !(state.f() > 0.0))
    fail(ErrorCode::BadInit, kRdVertexExplanation);

  RunResult out;
  out.f0 = state.f();
  out.support0 = state.x().support_size();
  out.trace.reserve(std::min<std::size_t>(config.max_iters, 1u << 16));

  using clock = std::chrono::steady_clock;
  bool stopped = false;
  for (std::size_t t = 0; t < config.max_iters; ++t) {
    const GapInfo g = fw_gap(state);
    if (g.gap_half <= config.epsilon) {
      out.stop = StopReason::GapReached;
      stopped = true;
      break;
    }
    if (config.kind == SolverKind::PFW && select_away(state) == g.s_index) {
      // Zero pairwise direction; only reachable through rounding.
      out.stop = StopReason::GapReached;
      stopped = true;
      break;
    }

    const auto t0 = config.time_iterations ? clock::now() : clock::time_point{};
    StepRecord rec;
    switch (config.kind) {
      case SolverKind::FW: rec = fw_step(state, a); break;
      case SolverKind::PFW: rec = pfw_step(state, a); break;
      case SolverKind::AFW: rec = afw_step(state, a); break;
      case SolverKind::RD: rec = rd_step(state, a); break;
    }
    if (config.time_iterations) {
      out.iteration_ns.push_back(
          std::chrono::duration<double, std::nano>(clock::now() - t0).count());
    }
    out.trace.push_back(rec);
    if (observer) observer(state, rec);
    if (rec.step_norm <= config.epsilon) {
      out.stop = StopReason::IterateConverged;
      stopped = true;
      break;
    }
  }
  if (!stopped) out.stop = StopReason::MaxIters;

  out.final_gap_half = fw_gap(state).gap_half;
  out.f = state.f();
  out.x = state.x();
  return out;
}

}  // namespace dsfw
