#include "dsfw/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "dsfw/error.hpp"

namespace dsfw {

namespace {

struct Table {
  std::map<std::pair<int, int>, double> cells;
  std::map<int, double> rows;  // pred
  std::map<int, double> cols;  // truth
  double n = 0.0;
};

Table contingency(std::span<const int> pred, std::span<const int> truth, Unassigned mode) {
  if (pred.size() != truth.size()) fail(ErrorCode::LengthMismatch, "label vectors differ in length");
  Table t;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] < 0 || truth[i] < 0) fail(ErrorCode::RangeError, "labels must be nonnegative");
    if (mode == Unassigned::Exclude && pred[i] == 0) continue;
    t.cells[{pred[i], truth[i]}] += 1.0;
    t.rows[pred[i]] += 1.0;
    t.cols[truth[i]] += 1.0;
    t.n += 1.0;
  }
  if (t.n == 0.0) fail(ErrorCode::EmptyOverlap, "no assigned objects to score");
  return t;
}

double comb2(double x) { return 0.5 * x * (x - 1.0); }

double entropy(const std::map<int, double>& counts, double n) {
  double h = 0.0;
  for (const auto& [k, c] : counts) {
    const double p = c / n;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double assignment_rate(std::span<const int> pred) {
  if (pred.empty()) fail(ErrorCode::TooSmall, "empty label vector");
  std::size_t k = 0;
  for (int v : pred) k += v > 0 ? 1 : 0;
  return static_cast<double>(k) / static_cast<double>(pred.size());
}

double ari(std::span<const int> pred, std::span<const int> truth, Unassigned mode) {
  const Table t = contingency(pred, truth, mode);
  double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [k, c] : t.cells) sum_cells += comb2(c);
  for (const auto& [k, c] : t.rows) sum_rows += comb2(c);
  for (const auto& [k, c] : t.cols) sum_cols += comb2(c);
  const double total = comb2(t.n);
  if (total == 0.0) return 1.0;
  const double expected = sum_rows * sum_cols / total;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  const double denom = max_index - expected;
  if (denom == 0.0) return 1.0;
  return (sum_cells - expected) / denom;
}

VMeasure v_measure_parts(std::span<const int> pred, std::span<const int> truth,
                         Unassigned mode) {
  const Table t = contingency(pred, truth, mode);
  const double h_truth = entropy(t.cols, t.n);
  const double h_pred = entropy(t.rows, t.n);
  double mi = 0.0;
  for (const auto& [key, c] : t.cells) {
    const double pr = t.rows.at(key.first);
    const double tr = t.cols.at(key.second);
    mi += (c / t.n) * std::log(c * t.n / (pr * tr));
  }
  VMeasure m;
  // H(truth | pred) = H(truth) - MI, likewise for completeness.
  m.homogeneity = h_truth == 0.0 ? 1.0 : std::clamp(mi / h_truth, 0.0, 1.0);
  m.completeness = h_pred == 0.0 ? 1.0 : std::clamp(mi / h_pred, 0.0, 1.0);
  const double s = m.homogeneity + m.completeness;
  m.v = s == 0.0 ? 0.0 : 2.0 * m.homogeneity * m.completeness / s;
  return m;
}

double v_measure(std::span<const int> pred, std::span<const int> truth, Unassigned mode) {
  return v_measure_parts(pred, truth, mode).v;
}

}  // namespace dsfw
