#include "dsfw/peel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dsfw/error.hpp"

namespace dsfw {

void PeelConfig::validate() const {
  if (max_clusters < 1) fail(ErrorCode::InvalidConfig, "max_clusters must be >= 1");
  if (!(cutoff > 0.0)) fail(ErrorCode::InvalidConfig, "cutoff must be positive");
  if (!(shift >= 0.0)) fail(ErrorCode::InvalidConfig, "shift must be nonnegative");
  solver.validate();
}

std::vector<std::size_t> extract_support(const SimplexPoint& x, double cutoff) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < x.dim(); ++i)
    if (x[i] > cutoff) out.push_back(i);
  if (out.empty()) fail(ErrorCode::EmptyCluster, "no component exceeds the cutoff");
  return out;
}

std::vector<std::size_t> extract_support(const SimplexPoint& x, double cutoff,
                                         std::span<const std::size_t> ids) {
  if (ids.size() != x.dim()) fail(ErrorCode::DimensionMismatch, "index map size mismatch");
  auto local = extract_support(x, cutoff);
  for (auto& i : local) i = ids[i];
  return local;
}

namespace {

// The caller's custom start lives in the full index space; restrict it to the
// survivors and renormalize, or fall back to the barycenter when nothing is left.
SolverConfig round_config(const SolverConfig& base, std::span<const std::size_t> ids) {
  SolverConfig c = base;
  if (base.init != InitKind::Custom || !base.custom_start) return c;
  const SimplexPoint& full = *base.custom_start;
  std::vector<double> sub(ids.size());
  double s = 0.0;
  for (std::size_t p = 0; p < ids.size(); ++p) {
    sub[p] = ids[p] < full.dim() ? full[ids[p]] : 0.0;
    s += sub[p];
  }
  if (s > 0.0) {
    for (double& v : sub) v /= s;
    double t = 0.0;
    for (double v : sub) t += v;
    // Renormalization can leave a residue just above the tolerance.
    if (std::abs(t - 1.0) <= SimplexPoint::kSumTol) {
      c.custom_start = SimplexPoint::from_coords(std::move(sub));
      return c;
    }
  }
  c.init = InitKind::Barycenter;
  c.custom_start.reset();
  return c;
}

}  // namespace

ClusteringResult peel(const SimilarityMatrix& a, const PeelConfig& config) {
  config.validate();
  const std::size_t n = a.size();
  if (config.solver.init == InitKind::Custom && config.solver.custom_start &&
      config.solver.custom_start->dim() != n)
    fail(ErrorCode::DimensionMismatch, "custom start dimension differs from the matrix");
  ClusteringResult res;
  res.labels.assign(n, 0);

  std::vector<std::size_t> surviving(n);
  std::iota(surviving.begin(), surviving.end(), std::size_t{0});

  while (res.clusters.size() < config.max_clusters && !surviving.empty()) {
    const int label = static_cast<int>(res.clusters.size()) + 1;
    if (surviving.size() == 1) {
      ClusterRecord rec;
      rec.members = surviving;
      rec.surviving = surviving;
      rec.characteristic = SimplexPoint::vertex(1, 0);
      rec.stop = StopReason::GapReached;
      res.labels[surviving[0]] = label;
      res.assigned_count += 1;
      res.clusters.push_back(std::move(rec));
      surviving.clear();
      break;
    }

    SimilarityMatrix sub = a.submatrix(surviving);
    if (config.shift > 0.0) sub = sub.shifted(config.shift);

    RunResult rr = run(sub, round_config(config.solver, surviving));
    std::vector<std::size_t> members;
    try {
      members = extract_support(rr.x, config.cutoff, surviving);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyCluster) throw;
      break;
    }

    ClusterRecord rec;
    rec.members = members;
    rec.surviving = surviving;
    rec.characteristic = std::move(rr.x);
    rec.objective = rr.f;
    rec.iterations = rr.trace.size();
    rec.stop = rr.stop;
    rec.iteration_ns = std::move(rr.iteration_ns);
    for (std::size_t id : members) res.labels[id] = label;
    res.assigned_count += members.size();
    res.clusters.push_back(std::move(rec));
    if (config.keep_traces) res.traces.push_back(std::move(rr.trace));

    // members and surviving are both ascending.
    std::vector<std::size_t> next;
    next.reserve(surviving.size() - members.size());
    std::size_t m = 0;
    for (std::size_t id : surviving) {
      if (m < members.size() && members[m] == id) {
        ++m;
        continue;
      }
      next.push_back(id);
    }
    surviving = std::move(next);
  }

  if (config.post_assign && !res.clusters.empty()) return post_assign(std::move(res), a);
  return res;
}

ClusteringResult post_assign(ClusteringResult result, const SimilarityMatrix& a) {
  if (result.clusters.empty()) fail(ErrorCode::NoClusters, "post_assign needs at least one cluster");
  if (result.labels.size() != a.size())
    fail(ErrorCode::DimensionMismatch, "labels and matrix sizes differ");

  std::vector<std::size_t> added;
  for (std::size_t j = 0; j < result.labels.size(); ++j) {
    if (result.labels[j] != 0) continue;
    const auto row = a.row(j);
    int best = 0;
    double best_mean = 0.0;
    for (std::size_t c = 0; c < result.clusters.size(); ++c) {
      const auto& mem = result.clusters[c].members;
      if (mem.empty()) continue;
      double s = 0.0;
      for (std::size_t p : mem) s += row[p];
      const double mean = s / static_cast<double>(mem.size());
      if (best == 0 || mean > best_mean) {
        best = static_cast<int>(c) + 1;
        best_mean = mean;
      }
    }
    if (best == 0) fail(ErrorCode::NoClusters, "every cluster is empty");
    result.labels[j] = best;
    added.push_back(j);
  }
  // Membership lists are updated after the scan so means use original clusters only.
  for (std::size_t j : added) {
    auto& mem = result.clusters[static_cast<std::size_t>(result.labels[j]) - 1].members;
    mem.insert(std::upper_bound(mem.begin(), mem.end(), j), j);
  }
  result.assigned_count += added.size();
  return result;
}

}  // namespace dsfw
