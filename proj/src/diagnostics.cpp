#include "dsfw/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dsfw/error.hpp"

namespace dsfw {

bool StateReport::consistent(double tol) const {
  return r_deviation <= tol && f_deviation <= tol * std::max(1.0, std::abs(f_dense));
}

StateReport check_state(const SolverState& state, const SimilarityMatrix& a) {
  const auto dense = matvec(a, state.x());
  StateReport rep;
  const auto r = state.r();
  double f = 0.0;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    rep.r_deviation = std::max(rep.r_deviation, std::abs(r[i] - dense[i]));
    f += dense[i] * state.x()[i];
  }
  rep.f_dense = f;
  rep.f_deviation = std::abs(state.f() - f);
  return rep;
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double step_scale(const StepRecord& s) {
  return std::max({std::abs(s.f_before), std::abs(s.f_after), std::abs(s.r_s), std::abs(s.r_v),
                   std::abs(s.a_sv)}) *
         (1.0 + s.gamma) * (1.0 + s.gamma);
}

}  // namespace

ProgressReport check_progress(std::span<const StepRecord> trace, const OffDiagExtremes& ext,
                              const ProgressOptions& opt) {
  ProgressReport rep;
  auto flag = [&](const StepRecord& s, std::string what, double obs, double pred) {
    if (opt.strict) {
      fail(ErrorCode::IdentityViolated,
           "step " + std::to_string(s.t) + " (" + std::string(to_string(s.kind)) + "): " + what +
               ", observed " + std::to_string(obs) + ", predicted " + std::to_string(pred));
    }
    rep.violations.push_back({s.t, s.kind, std::move(what), obs, pred});
  };

  for (const StepRecord& s : trace) {
    const double df = s.f_after - s.f_before;
    const double floor = opt.rounding_ulps * kEps * step_scale(s);
    if (df < -floor) flag(s, "objective decreased", s.f_after, s.f_before);
    if (!is_good(s.kind)) continue;

    const double f = s.f_before;
    double pred = 0.0;
    double curvature = 0.0;  // c in g^2 <= 4 c df
    switch (s.kind) {
      case StepKind::FwGood:
        pred = (s.r_s - f) * (s.r_s - f) / (2.0 * s.r_s - f);
        curvature = 2.0 * s.r_s - f;
        break;
      case StepKind::PairwiseGood:
        pred = (s.r_s - s.r_v) * (s.r_s - s.r_v) / (2.0 * s.a_sv);
        curvature = 2.0 * ext.max;
        break;
      case StepKind::AwayGood:
        pred = (f - s.r_v) * (f - s.r_v) / (2.0 * s.r_v - f);
        curvature = 2.0 * s.r_v - f;
        break;
      default: break;
    }
    ++rep.checked;
    const double tol = opt.rel_tol * std::abs(pred) + floor;
    if (!(std::abs(df - pred) <= tol)) flag(s, "objective gain differs from closed form", df, pred);
    const double lhs = s.gap * s.gap;
    const double rhs = 4.0 * curvature * std::max(df, pred);
    if (!(lhs <= rhs * (1.0 + opt.rel_tol) + 4.0 * curvature * floor))
      flag(s, "gap exceeds progress bound", lhs, rhs);
  }
  return rep;
}

double min_gap(std::span<const StepRecord> trace, std::optional<double> final_gap) {
  if (trace.empty() && !final_gap) fail(ErrorCode::EmptyTrace, "trace is empty");
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : trace) m = std::min(m, s.gap);
  if (final_gap) m = std::min(m, *final_gap);
  return m;
}

std::vector<double> min_gap_curve(std::span<const StepRecord> trace) {
  std::vector<double> out;
  out.reserve(trace.size());
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : trace) {
    m = std::min(m, s.gap);
    out.push_back(m);
  }
  return out;
}

BoundReport theorem_bound(std::span<const StepRecord> trace, SolverKind kind,
                          const OffDiagExtremes& ext, std::size_t support0, std::size_t n,
                          std::optional<double> final_gap) {
  if (trace.empty()) fail(ErrorCode::EmptyTrace, "trace is empty");
  if (kind == SolverKind::RD) fail(ErrorCode::InvalidConfig, "no gap bound exists for RD");
  BoundReport b;
  b.t = trace.size();
  b.support0 = support0;
  b.min_gap = min_gap(trace, final_gap);
  b.f0 = trace.front().f_before;
  b.ft = trace.back().f_after;
  for (const auto& s : trace) {
    if (is_good(s.kind)) ++b.good_steps;
    else if (s.kind == StepKind::Drop) ++b.drop_steps;
    else if (s.kind == StepKind::Swap) ++b.swap_steps;
  }
  const double gain = std::max(0.0, b.ft - b.f0);
  const double t = static_cast<double>(b.t);
  const double max_gap = 2.0 * ext.max;

  switch (kind) {
    case SolverKind::FW:
      b.beta = 2.0 * ext.max - ext.min;
      b.bound_value = 2.0 * std::sqrt(b.beta * gain / t);
      break;
    case SolverKind::PFW: {
      b.beta = 2.0 * ext.max;
      // 6 n! M gain / t, assembled in log space.
      const double log_arg = std::log(6.0) + std::lgamma(static_cast<double>(n) + 1.0) +
                             std::log(ext.max) + std::log(gain) - std::log(t);
      b.bound_value = (ext.max > 0.0 && gain > 0.0) ? 2.0 * std::exp(0.5 * log_arg) : 0.0;
      break;
    }
    case SolverKind::AFW: {
      b.beta = 2.0 * ext.max - ext.min;
      const double denom = t + 1.0 - static_cast<double>(support0);
      b.bound_value = denom > 0.0 ? 2.0 * std::sqrt(2.0 * b.beta * gain / denom)
                                  : std::numeric_limits<double>::infinity();
      b.drop_bound_ok = 2.0 * static_cast<double>(b.drop_steps) <=
                        static_cast<double>(support0) - 1.0 + t;
      break;
    }
    case SolverKind::RD: break;
  }
  b.trivial = b.bound_value >= max_gap;
  b.satisfied = b.trivial || b.min_gap <= b.bound_value;
  return b;
}

DecayFit decay_fit(std::span<const double> t, std::span<const double> g) {
  if (t.size() != g.size()) fail(ErrorCode::LengthMismatch, "t and g differ in length");
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] >= 1.0 && g[k] > 0.0 && std::isfinite(g[k])) {
      xs.push_back(std::log(t[k]));
      ys.push_back(std::log(g[k]));
    }
  }
  if (xs.size() < 20) fail(ErrorCode::TooFewPoints, "decay fit needs at least 20 usable points");
  const double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  DecayFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  fit.consistent = fit.slope <= -0.4;
  return fit;
}

}  // namespace dsfw
