#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace dsfw {

/// Plain dense n x n matrix, row-major. No structural guarantees; used for
/// raw input, distance matrices and other intermediate square arrays.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0)
      : n_(n), a_(n * n, fill) {}
  SquareMatrix(std::size_t n, std::vector<double> row_major);

  /// Throws NotSquare if the rows are ragged or their count differs from
  /// their length.
  static SquareMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {a_.data() + i * n_, n_};
  }
  std::span<const double> data() const noexcept { return a_; }

  bool is_symmetric(double tol = 0.0) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

/// Symmetric, nonnegative similarity matrix with an exactly zero diagonal.
/// Immutable once constructed; safe to share between concurrent solver runs.
class SimilarityMatrix {
 public:
  static constexpr double kSymmetryTol = 1e-9;
  static constexpr double kDiagonalTol = 1e-12;

  SimilarityMatrix() = default;

  /// Validates and takes ownership. Pairs within kSymmetryTol are averaged so
  /// the stored matrix is exactly symmetric; diagonal entries within
  /// kDiagonalTol are forced to 0.
  explicit SimilarityMatrix(SquareMatrix raw);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  /// Row i, which equals column i by symmetry.
  std::span<const double> row(std::size_t i) const {
    return {a_.data() + i * n_, n_};
  }
  std::span<const double> column(std::size_t j) const { return row(j); }
  std::span<const double> data() const noexcept { return a_; }

  std::vector<double> row_sums() const;

  SimilarityMatrix submatrix(std::span<const std::size_t> idx) const;
  /// Adds c to every off-diagonal entry.
  SimilarityMatrix shifted(double c) const;
  SimilarityMatrix scaled(double c) const;

  SquareMatrix to_square() const { return SquareMatrix(n_, a_); }

 private:
  struct Trusted {};
  SimilarityMatrix(Trusted, std::size_t n, std::vector<double> a)
      : n_(n), a_(std::move(a)) {}

  std::size_t n_ = 0;
  std::vector<double> a_;
};

SimilarityMatrix new_similarity_matrix(const std::vector<std::vector<double>>& raw);

/// A point of the standard simplex with explicit support bookkeeping.
///
/// The support is only ever changed by the mutators below: a component enters
/// when mass is moved onto it and leaves when a step removes its mass exactly.
/// Nothing re-derives it by thresholding coordinates.
class SimplexPoint {
 public:
  static constexpr double kSumTol = 1e-12;

  SimplexPoint() = default;

  static SimplexPoint barycenter(std::size_t n);
  static SimplexPoint vertex(std::size_t n, std::size_t i);
  /// Validates nonnegativity and unit sum (within kSumTol).
  static SimplexPoint from_coords(std::vector<double> coords);

  std::size_t dim() const noexcept { return x_.size(); }
  double operator[](std::size_t i) const { return x_[i]; }
  std::span<const double> coords() const noexcept { return x_; }
  bool in_support(std::size_t i) const { return in_support_[i] != 0; }
  std::size_t support_size() const noexcept { return support_size_; }
  std::vector<std::size_t> support() const;
  double sum() const;

  // Step primitives. Each returns the squared Euclidean norm of the change
  // and the resulting coordinate sum so callers can apply the stopping rule
  // and drift correction without another pass.
  struct Delta {
    double sq_norm = 0.0;
    double sum = 0.0;
  };

  /// x <- (1 - gamma) x + gamma e_i, gamma in (0, 1).
  Delta toward_vertex(std::size_t i, double gamma);
  /// x <- x + gamma (e_to - e_from). When drop is set the source is zeroed
  /// exactly and leaves the support.
  Delta transfer(std::size_t from, std::size_t to, double gamma, bool drop);
  /// x <- (1 + gamma) x - gamma e_j. When drop is set x_j becomes exactly 0.
  Delta away_from_vertex(std::size_t j, double gamma, bool drop);
  /// x_i <- x_i r_i / f.
  Delta replicator(std::span<const double> r, double f);

  /// Divides every coordinate by s.
  void rescale(double s);

 private:
  void set_zero(std::size_t i);

  std::vector<double> x_;
  std::vector<std::uint8_t> in_support_;
  std::size_t support_size_ = 0;
};

/// Dense A x. O(n^2); serves as the oracle for the incremental updates.
std::vector<double> matvec(const SimilarityMatrix& a, std::span<const double> x);
std::vector<double> matvec(const SimilarityMatrix& a, const SimplexPoint& x);

double quadratic_form(const SimilarityMatrix& a, std::span<const double> x);
double quadratic_form(const SimilarityMatrix& a, const SimplexPoint& x);

struct OffDiagExtremes {
  double min = 0.0;
  double max = 0.0;
};

OffDiagExtremes offdiag_extremes(const SimilarityMatrix& a);

}  // namespace dsfw
