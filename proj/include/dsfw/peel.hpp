#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dsfw/matrix.hpp"
#include "dsfw/solver.hpp"

namespace dsfw {

/// One extracted dominant set.
struct ClusterRecord {
  std::vector<std::size_t> members;    // original object ids, ascending
  std::vector<std::size_t> surviving;  // ids of the submatrix it was solved on
  SimplexPoint characteristic;         // solution over `surviving`
  double objective = 0.0;
  std::size_t iterations = 0;
  StopReason stop = StopReason::MaxIters;
  /// Per-iteration wall time, when the solver was asked to record it.
  std::vector<double> iteration_ns;
};

struct ClusteringResult {
  /// 0 = unassigned, c > 0 = member of clusters[c - 1].
  std::vector<int> labels;
  std::vector<ClusterRecord> clusters;
  std::size_t assigned_count = 0;
  /// Per-round solver traces, filled when PeelConfig::keep_traces is set.
  std::vector<std::vector<StepRecord>> traces;

  std::size_t k_found() const noexcept { return clusters.size(); }
  double assignment_rate() const noexcept {
    return labels.empty() ? 0.0
                          : static_cast<double>(assigned_count) /
                                static_cast<double>(labels.size());
  }
};

struct PeelConfig {
  std::size_t max_clusters = 1;
  /// Membership threshold on solution components.
  double cutoff = 2e-12;
  SolverConfig solver;
  /// Added to the off-diagonal entries of each round's submatrix.
  double shift = 0.0;
  bool post_assign = false;
  bool keep_traces = false;

  void validate() const;
};

/// Local indices i with x_i > cutoff. Throws EmptyCluster when none qualify.
std::vector<std::size_t> extract_support(const SimplexPoint& x, double cutoff);
/// Same, mapped through `ids` to original object ids.
std::vector<std::size_t> extract_support(const SimplexPoint& x, double cutoff,
                                         std::span<const std::size_t> ids);

ClusteringResult peel(const SimilarityMatrix& a, const PeelConfig& config);

/// Attaches every unassigned object to the cluster with the highest mean
/// similarity to it; ties go to the lowest label.
ClusteringResult post_assign(ClusteringResult result, const SimilarityMatrix& a);

}  // namespace dsfw
