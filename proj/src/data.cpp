#include "dsfw/data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "dsfw/error.hpp"

namespace dsfw {

FeatureMatrix::FeatureMatrix(std::size_t n_, std::size_t d_, std::vector<double> values)
    : n(n_), d(d_), rows(std::move(values)) {
  if (rows.size() != n * d)
    fail(ErrorCode::DimensionMismatch, "feature matrix needs n*d values");
  for (double v : rows)
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteEntry, "feature values must be finite");
}

SimilarityMatrix cosine_similarity(const FeatureMatrix& f, double shift) {
  const std::size_t n = f.n;
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double v : f.row(i)) s += v * v;
    if (s == 0.0) fail(ErrorCode::ZeroNormRow, "row " + std::to_string(i) + " has zero norm");
    norms[i] = std::sqrt(s);
  }
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ri = f.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto rj = f.row(j);
      double dot = 0.0;
      for (std::size_t k = 0; k < f.d; ++k) dot += ri[k] * rj[k];
      const double c = std::clamp(dot / (norms[i] * norms[j]), -1.0, 1.0);
      a[i * n + j] = a[j * n + i] = c + shift;
    }
  }
  return SimilarityMatrix(SquareMatrix(n, std::move(a)));
}

FeatureMatrix hsv_features(std::span<const HsvPixel> pixels) {
  std::vector<double> out;
  out.reserve(pixels.size() * 3);
  for (const auto& p : pixels) {
    if (!(p.h >= 0.0 && p.h <= 2.0 * std::numbers::pi) || !(p.s >= 0.0 && p.s <= 1.0) ||
        !(p.v >= 0.0 && p.v <= 1.0)) {
      fail(ErrorCode::RangeError, "HSV pixel out of range (h in [0,2pi], s,v in [0,1])");
    }
    out.push_back(p.v);
    out.push_back(p.v * p.s * std::sin(p.h));
    out.push_back(p.v * p.s * std::cos(p.h));
  }
  return FeatureMatrix(pixels.size(), 3, std::move(out));
}

SquareMatrix pairwise_euclidean(const FeatureMatrix& f) {
  const std::size_t n = f.n;
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ri = f.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto rj = f.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < f.d; ++k) s += (ri[k] - rj[k]) * (ri[k] - rj[k]);
      d[i * n + j] = d[j * n + i] = std::sqrt(s);
    }
  }
  return SquareMatrix(n, std::move(d));
}

namespace {

void require_distance(const SquareMatrix& d, bool nonnegative) {
  if (!d.is_symmetric(SimilarityMatrix::kSymmetryTol))
    fail(ErrorCode::AsymmetricMatrix, "distance matrix must be symmetric");
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (std::abs(d(i, i)) > SimilarityMatrix::kDiagonalTol)
      fail(ErrorCode::NonzeroDiagonal, "distance matrix must have a zero diagonal");
  }
  for (double v : d.data()) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteEntry, "distance entries must be finite");
    if (nonnegative && v < 0.0) fail(ErrorCode::NegativeEntry, "distances must be nonnegative");
  }
}

}  // namespace

SquareMatrix minimax_distances(const SquareMatrix& d) {
  require_distance(d, false);
  const std::size_t n = d.size();
  if (n == 0) return d;

  // Prim on the complete graph.
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, none);
  std::vector<char> in_tree(n, 0);
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  best[0] = 0.0;
  for (std::size_t it = 0; it < n; ++it) {
    std::size_t u = none;
    for (std::size_t v = 0; v < n; ++v)
      if (!in_tree[v] && (u == none || best[v] < best[u])) u = v;
    in_tree[u] = 1;
    if (parent[u] != none) {
      adj[u].emplace_back(parent[u], best[u]);
      adj[parent[u]].emplace_back(u, best[u]);
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (!in_tree[v] && d(u, v) < best[v]) {
        best[v] = d(u, v);
        parent[v] = u;
      }
    }
  }

  std::vector<double> out(n * n, 0.0);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> from(n);
  for (std::size_t src = 0; src < n; ++src) {
    double* row = out.data() + src * n;
    from.assign(n, none);
    from[src] = src;
    stack.assign(1, src);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (const auto& [v, w] : adj[u]) {
        if (from[v] != none) continue;
        from[v] = u;
        row[v] = std::max(row[u], w);
        stack.push_back(v);
      }
    }
    row[src] = 0.0;
  }
  // Both traversal directions see the same edges, but force exact symmetry.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out[j * n + i] = out[i * n + j];
  return SquareMatrix(n, std::move(out));
}

SimilarityMatrix max_transform(const SquareMatrix& d) {
  require_distance(d, true);
  const std::size_t n = d.size();
  double m = 0.0;
  for (double v : d.data()) m = std::max(m, v);
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) a[i * n + j] = m - d(i, j);
  return SimilarityMatrix(SquareMatrix(n, std::move(a)));
}

void SyntheticSpec::validate() const {
  if (!(noise >= 0.0 && noise <= 1.0)) fail(ErrorCode::RangeError, "noise must lie in [0,1]");
  if (n == 0) fail(ErrorCode::TooSmall, "n must be positive");
  if (kind == SyntheticKind::BlockNoise && (k == 0 || k > n))
    fail(ErrorCode::InvalidConfig, "k must lie in [1, n]");
  if (kind == SyntheticKind::GaussMix && !(mean_spacing > 0.0))
    fail(ErrorCode::InvalidConfig, "mean spacing must be positive");
  if (kind == SyntheticKind::GaussMix && k != 4)
    fail(ErrorCode::InvalidConfig, "the Gaussian mixture has exactly 4 clusters");
}

BlockNoiseData block_noise_matrix(const SyntheticSpec& spec) {
  spec.validate();
  if (spec.kind != SyntheticKind::BlockNoise)
    fail(ErrorCode::InvalidConfig, "settings are not for block noise");
  std::mt19937_64 rng(spec.seed);
  const std::size_t n = spec.n;
  std::uniform_int_distribution<int> pick(1, static_cast<int>(spec.k));
  std::vector<int> truth(n);
  for (auto& t : truth) t = pick(rng);

  std::uniform_real_distribution<double> mu(0.0, 1.0);
  std::bernoulli_distribution zero(spec.noise);
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (truth[i] != truth[j]) continue;
      const double m = mu(rng);
      const bool z0 = zero(rng);
      a[i * n + j] = a[j * n + i] = z0 ? 0.0 : m;
    }
  }
  return {SimilarityMatrix(SquareMatrix(n, std::move(a))), std::move(truth)};
}

GaussData gauss_dataset(const SyntheticSpec& spec) {
  spec.validate();
  if (spec.kind != SyntheticKind::GaussMix)
    fail(ErrorCode::InvalidConfig, "settings are not for a Gaussian mixture");
  std::mt19937_64 rng(spec.seed);
  const std::size_t n = spec.n;
  const auto n1 = static_cast<std::size_t>(std::llround(spec.noise * static_cast<double>(n)));
  const std::size_t n2 = n - n1;
  std::size_t sizes[4];
  std::size_t used = 0;
  for (int c = 0; c < 3; ++c) {
    sizes[c] = static_cast<std::size_t>(std::floor(0.1 * (c + 1) * static_cast<double>(n2) + 1e-9));
    used += sizes[c];
  }
  sizes[3] = n2 - used;

  const double sp = spec.mean_spacing;
  const double means[4][2] = {{0.0, 0.0}, {sp, 0.0}, {0.0, sp}, {sp, sp}};
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> box(-0.5 * sp, 1.5 * sp);

  std::vector<double> pts;
  pts.reserve(2 * n);
  std::vector<int> truth;
  truth.reserve(n);
  for (int c = 0; c < 4; ++c) {
    for (std::size_t p = 0; p < sizes[c]; ++p) {
      const double x = means[c][0] + gauss(rng);
      const double y = means[c][1] + gauss(rng);
      pts.push_back(x);
      pts.push_back(y);
      truth.push_back(c + 1);
    }
  }
  const int bg = spec.background_as_zero ? 0 : 5;
  for (std::size_t p = 0; p < n1; ++p) {
    const double x = box(rng);
    const double y = box(rng);
    pts.push_back(x);
    pts.push_back(y);
    truth.push_back(bg);
  }
  return {FeatureMatrix(n, 2, std::move(pts)), std::move(truth)};
}

}  // namespace dsfw
