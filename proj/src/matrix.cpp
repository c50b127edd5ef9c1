#include "dsfw/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dsfw/error.hpp"

namespace dsfw {

SquareMatrix::SquareMatrix(std::size_t n, std::vector<double> row_major)
    : n_(n), a_(std::move(row_major)) {
  if (a_.size() != n * n) {
    fail(ErrorCode::NotSquare, "expected " + std::to_string(n * n) +
                                   " entries, got " + std::to_string(a_.size()));
  }
}

SquareMatrix SquareMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  std::vector<double> a;
  a.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      fail(ErrorCode::NotSquare, "row " + std::to_string(i) + " has " +
                                     std::to_string(rows[i].size()) +
                                     " entries, expected " + std::to_string(n));
    }
    a.insert(a.end(), rows[i].begin(), rows[i].end());
  }
  return SquareMatrix(n, std::move(a));
}

bool SquareMatrix::is_symmetric(double tol) const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
  return true;
}

SimilarityMatrix::SimilarityMatrix(SquareMatrix raw) : n_(raw.size()) {
  const std::size_t n = n_;
  a_.assign(raw.data().begin(), raw.data().end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(a_[i * n + j])) {
        fail(ErrorCode::NonFiniteEntry, "entry (" + std::to_string(i) + "," +
                                            std::to_string(j) + ") is not finite");
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double& u = a_[i * n + j];
      double& l = a_[j * n + i];
      if (std::abs(u - l) > kSymmetryTol) {
        fail(ErrorCode::AsymmetricMatrix,
             "entries (" + std::to_string(i) + "," + std::to_string(j) +
                 ") and its transpose differ by " + std::to_string(std::abs(u - l)));
      }
      const double mean = 0.5 * (u + l);
      u = mean;
      l = mean;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double& d = a_[i * n + i];
    if (std::abs(d) > kDiagonalTol) {
      fail(ErrorCode::NonzeroDiagonal,
           "diagonal entry " + std::to_string(i) + " is " + std::to_string(d));
    }
    d = 0.0;
  }
  for (std::size_t k = 0; k < n * n; ++k) {
    if (a_[k] < 0.0) {
      fail(ErrorCode::NegativeEntry, "entry (" + std::to_string(k / n) + "," +
                                         std::to_string(k % n) + ") is negative");
    }
  }
}

SimilarityMatrix new_similarity_matrix(const std::vector<std::vector<double>>& raw) {
  return SimilarityMatrix(SquareMatrix::from_rows(raw));
}

std::vector<double> SimilarityMatrix::row_sums() const {
  std::vector<double> s(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const auto r = row(i);
    double acc = 0.0;
    for (double v : r) acc += v;
    s[i] = acc;
  }
  return s;
}

SimilarityMatrix SimilarityMatrix::submatrix(std::span<const std::size_t> idx) const {
  const std::size_t m = idx.size();
  std::vector<double> b(m * m);
  for (std::size_t p = 0; p < m; ++p) {
    if (idx[p] >= n_) fail(ErrorCode::DimensionMismatch, "submatrix index out of range");
    const auto r = row(idx[p]);
    for (std::size_t q = 0; q < m; ++q) b[p * m + q] = r[idx[q]];
  }
  return SimilarityMatrix(Trusted{}, m, std::move(b));
}

SimilarityMatrix SimilarityMatrix::shifted(double c) const {
  std::vector<double> b = a_;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (i != j) b[i * n_ + j] += c;
  // Negative shifts can break the contract, so go through validation.
  return SimilarityMatrix(SquareMatrix(n_, std::move(b)));
}

SimilarityMatrix SimilarityMatrix::scaled(double c) const {
  if (!(c > 0.0)) fail(ErrorCode::InvalidConfig, "scale factor must be positive");
  std::vector<double> b = a_;
  for (double& v : b) v *= c;
  return SimilarityMatrix(Trusted{}, n_, std::move(b));
}

// ---------------------------------------------------------------------------

SimplexPoint SimplexPoint::barycenter(std::size_t n) {
  if (n == 0) fail(ErrorCode::TooSmall, "simplex dimension must be positive");
  SimplexPoint p;
  p.x_.assign(n, 1.0 / static_cast<double>(n));
  p.in_support_.assign(n, 1);
  p.support_size_ = n;
  return p;
}

SimplexPoint SimplexPoint::vertex(std::size_t n, std::size_t i) {
  if (i >= n) fail(ErrorCode::DimensionMismatch, "vertex index out of range");
  SimplexPoint p;
  p.x_.assign(n, 0.0);
  p.in_support_.assign(n, 0);
  p.x_[i] = 1.0;
  p.in_support_[i] = 1;
  p.support_size_ = 1;
  return p;
}

SimplexPoint SimplexPoint::from_coords(std::vector<double> coords) {
  if (coords.empty()) fail(ErrorCode::TooSmall, "simplex dimension must be positive");
  double s = 0.0;
  for (double v : coords) {
    if (!std::isfinite(v) || v < 0.0)
      fail(ErrorCode::RangeError, "simplex coordinates must be finite and nonnegative");
    s += v;
  }
  if (std::abs(s - 1.0) > kSumTol)
    fail(ErrorCode::RangeError, "simplex coordinates must sum to 1");
  SimplexPoint p;
  p.in_support_.resize(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    p.in_support_[i] = coords[i] > 0.0 ? 1 : 0;
    p.support_size_ += p.in_support_[i];
  }
  p.x_ = std::move(coords);
  return p;
}

std::vector<std::size_t> SimplexPoint::support() const {
  std::vector<std::size_t> s;
  s.reserve(support_size_);
  for (std::size_t i = 0; i < x_.size(); ++i)
    if (in_support_[i]) s.push_back(i);
  return s;
}

double SimplexPoint::sum() const {
  double s = 0.0;
  for (double v : x_) s += v;
  return s;
}

void SimplexPoint::set_zero(std::size_t i) {
  x_[i] = 0.0;
  if (in_support_[i]) {
    in_support_[i] = 0;
    --support_size_;
  }
}

SimplexPoint::Delta SimplexPoint::toward_vertex(std::size_t i, double gamma) {
  Delta d;
  const double keep = 1.0 - gamma;
  const std::size_t n = x_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double old = x_[k];
    double nv = keep * old;
    if (k == i) nv += gamma;
    x_[k] = nv;
    d.sq_norm += (nv - old) * (nv - old);
    d.sum += nv;
    if (in_support_[k] && nv == 0.0) set_zero(k);  // underflow
  }
  if (!in_support_[i] && x_[i] > 0.0) {
    in_support_[i] = 1;
    ++support_size_;
  }
  return d;
}

SimplexPoint::Delta SimplexPoint::transfer(std::size_t from, std::size_t to,
                                           double gamma, bool drop) {
  const double old_from = x_[from];
  const double old_to = x_[to];
  x_[to] = old_to + gamma;
  if (!in_support_[to]) {
    in_support_[to] = 1;
    ++support_size_;
  }
  if (drop) {
    set_zero(from);
  } else {
    x_[from] = old_from - gamma;
  }
  Delta d;
  const double dt = x_[to] - old_to;
  const double df = x_[from] - old_from;
  d.sq_norm = dt * dt + df * df;
  d.sum = sum();
  return d;
}

SimplexPoint::Delta SimplexPoint::away_from_vertex(std::size_t j, double gamma, bool drop) {
  Delta d;
  const double grow = 1.0 + gamma;
  const std::size_t n = x_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double old = x_[k];
    double nv;
    if (k == j) {
      nv = drop ? 0.0 : old - gamma * (1.0 - old);
    } else {
      nv = grow * old;
    }
    x_[k] = nv;
    d.sq_norm += (nv - old) * (nv - old);
    d.sum += nv;
  }
  if (drop || x_[j] <= 0.0) set_zero(j);
  return d;
}

SimplexPoint::Delta SimplexPoint::replicator(std::span<const double> r, double f) {
  Delta d;
  const std::size_t n = x_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double old = x_[k];
    if (!in_support_[k]) continue;
    const double nv = old * r[k] / f;
    x_[k] = nv;
    d.sq_norm += (nv - old) * (nv - old);
    d.sum += nv;
    if (nv == 0.0) set_zero(k);
  }
  return d;
}

void SimplexPoint::rescale(double s) {
  for (std::size_t k = 0; k < x_.size(); ++k) {
    if (!in_support_[k]) continue;
    x_[k] /= s;
    if (x_[k] == 0.0) set_zero(k);
  }
}

// ---------------------------------------------------------------------------

std::vector<double> matvec(const SimilarityMatrix& a, std::span<const double> x) {
  const std::size_t n = a.size();
  if (x.size() != n) {
    fail(ErrorCode::DimensionMismatch, "matvec: vector has length " +
                                           std::to_string(x.size()) + ", matrix is " +
                                           std::to_string(n));
  }
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = a.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += r[j] * x[j];
    y[i] = acc;
  }
  return y;
}

std::vector<double> matvec(const SimilarityMatrix& a, const SimplexPoint& x) {
  return matvec(a, x.coords());
}

double quadratic_form(const SimilarityMatrix& a, std::span<const double> x) {
  const auto y = matvec(a, x);
  double f = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) f += x[i] * y[i];
  return f;
}

double quadratic_form(const SimilarityMatrix& a, const SimplexPoint& x) {
  return quadratic_form(a, x.coords());
}

OffDiagExtremes offdiag_extremes(const SimilarityMatrix& a) {
  const std::size_t n = a.size();
  if (n < 2) fail(ErrorCode::TooSmall, "off-diagonal extremes need n >= 2");
  OffDiagExtremes e{std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = a(i, j);
      e.min = std::min(e.min, v);
      e.max = std::max(e.max, v);
    }
  }
  return e;
}

}  // namespace dsfw
