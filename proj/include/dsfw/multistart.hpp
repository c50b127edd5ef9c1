#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dsfw/matrix.hpp"
#include "dsfw/peel.hpp"
#include "dsfw/solver.hpp"

namespace dsfw {

using Rng = std::mt19937_64;

enum class Sampler { Uni, Dpp };
enum class OverlapMeasure { Candidate, Jaccard };
enum class StartPolicy { Default, VertexOnly, BiasedOnly, Both };

struct SamplePlan {
  std::size_t ell = 4;
  Sampler sampler = Sampler::Uni;
  double overlap_threshold = 0.10;
  OverlapMeasure overlap = OverlapMeasure::Candidate;
  /// Default: vertex start for FW, both starts for PFW and AFW.
  StartPolicy starts = StartPolicy::Default;
  /// Rescale the pool kernel so a DPP draw has ell items on average. Off
  /// means the raw diagonally dominant kernel, which keeps almost the whole pool.
  bool dpp_scale_to_ell = true;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Sorts objects by row sum (descending) and draws one index uniformly from
/// each of ell contiguous near-equal blocks.
std::vector<std::size_t> uniform_block_sample(const SimilarityMatrix& a, std::size_t ell, Rng& rng);

struct DppEnsemble {
  Eigen::MatrixXd likelihood;
  Eigen::VectorXd eigenvalues;   // clamped at 0
  Eigen::MatrixXd eigenvectors;  // columns

  /// Builds the ensemble from an already PSD likelihood.
  static DppEnsemble from_psd(Eigen::MatrixXd l);
};

/// Replaces the diagonal by the absolute off-diagonal row sum plus a small
/// margin, which makes the matrix PSD.
DppEnsemble make_diagonally_dominant(const Eigen::MatrixXd& l);

/// Rescales L so the expected subset size is k. Subset probabilities
/// conditioned on the size are unchanged. Needs 0 < k < rank(L).
DppEnsemble scale_to_expected_size(const DppEnsemble& ens, double k);

/// Spectral L-ensemble draw; returns indices in ascending order.
std::vector<std::size_t> dpp_sample(const DppEnsemble& ens, Rng& rng);

/// Stage one: ceil(n^(2/3)/10) uniform draws from each of 10 row-sum blocks.
std::vector<std::size_t> two_step_pool(const SimilarityMatrix& a, Rng& rng);
/// Stage two draws from the diagonally dominant pool kernel, optionally
/// rescaled to expected size ell, then trims to the ell largest diagonals or
/// tops up from the rest of the pool by block sampling.
std::vector<std::size_t> two_step_dpp_sample(const SimilarityMatrix& a, std::size_t ell, Rng& rng,
                                             bool scale_kernel = true);

struct SeedStarts {
  SimplexPoint vertex;
  SimplexPoint biased;
};

SeedStarts seed_starting_points(std::size_t i, std::size_t n);

struct MultistartResult {
  ClusteringResult clustering;
  std::size_t passes = 0;
};

/// Fraction of `candidate` covered by `accepted` under the chosen measure.
/// Both index lists must be ascending.
double overlap_fraction(const std::vector<std::size_t>& candidate,
                        const std::vector<std::size_t>& accepted, OverlapMeasure m);

MultistartResult multistart_cluster(const SimilarityMatrix& a, const SamplePlan& plan,
                                    const SolverConfig& solver, std::size_t max_clusters,
                                    double cutoff);

}  // namespace dsfw
