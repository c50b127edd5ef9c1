#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dsfw/matrix.hpp"

namespace dsfw {

struct FeatureMatrix {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> rows;  // n x d, row-major

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t n, std::size_t d, std::vector<double> values);
  std::span<const double> row(std::size_t i) const { return {rows.data() + i * d, d}; }
};

/// a_ij = cos(f_i, f_j) + shift off the diagonal, zero on it.
SimilarityMatrix cosine_similarity(const FeatureMatrix& f, double shift);

struct HsvPixel {
  double h = 0.0;  // radians in [0, 2pi]
  double s = 0.0;
  double v = 0.0;
};

/// Rows [v, v s sin h, v s cos h].
FeatureMatrix hsv_features(std::span<const HsvPixel> pixels);

SquareMatrix pairwise_euclidean(const FeatureMatrix& f);

/// Bottleneck (minimax path) distances, read off a minimum spanning tree.
SquareMatrix minimax_distances(const SquareMatrix& d);

/// max(D) - D with the diagonal zeroed.
SimilarityMatrix max_transform(const SquareMatrix& d);

enum class SyntheticKind { BlockNoise, GaussMix };

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::BlockNoise;
  std::size_t n = 200;
  std::size_t k = 5;
  double noise = 0.0;
  std::uint64_t seed = 0;
  /// GaussMix only: give background points truth label 0 instead of k + 1.
  bool background_as_zero = false;
  /// GaussMix only: distance between neighbouring means, in units of the
  /// (unit) standard deviation.
  double mean_spacing = 250.0;

  void validate() const;
};

struct BlockNoiseData {
  SimilarityMatrix a;
  std::vector<int> truth;  // 1..k
};

BlockNoiseData block_noise_matrix(const SyntheticSpec& spec);

struct GaussData {
  FeatureMatrix points;
  /// 1..4 for the Gaussian clusters, 5 (or 0) for background.
  std::vector<int> truth;
};

/// Four unit-covariance Gaussians at (0,0), (s,0), (0,s), (s,s) holding
/// 10/20/30/40% of the clustered points, plus round(p n) points uniform on
/// [-s/2, 3s/2]^2, where s is the mean spacing.
GaussData gauss_dataset(const SyntheticSpec& spec);

}  // namespace dsfw
