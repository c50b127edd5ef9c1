#pragma once

// Independent reference implementations used only by the tests. They are
// written for clarity over speed and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense random_symmetric(std::size_t n, std::mt19937_64& rng, double lo = 0.0,
                              double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Dense a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a[i][j] = a[j][i] = u(rng);
  return a;
}

inline std::vector<double> matvec(const Dense& a, const std::vector<double>& x) {
  std::vector<double> y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) y[i] += a[i][j] * x[j];
  return y;
}

inline double quad(const Dense& a, const std::vector<double>& x) {
  double f = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) f += x[i] * a[i][j] * x[j];
  return f;
}

// ARI by explicit enumeration of all object pairs.
inline double ari_pairs(const std::vector<int>& p, const std::vector<int>& t) {
  const std::size_t n = p.size();
  double tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool sp = p[i] == p[j], st = t[i] == t[j];
      if (sp && st) ++tp;
      else if (sp) ++fp;
      else if (st) ++fn;
      else ++tn;
    }
  }
  const double total = tp + fp + fn + tn;
  if (total == 0) return 1.0;
  const double same_p = tp + fp, same_t = tp + fn;
  const double expected = same_p * same_t / total;
  const double maxi = 0.5 * (same_p + same_t);
  if (maxi == expected) return 1.0;
  return (tp - expected) / (maxi - expected);
}

// V-measure from conditional entropies computed directly.
inline double v_measure_entropy(const std::vector<int>& pred, const std::vector<int>& truth) {
  const double n = static_cast<double>(pred.size());
  std::map<int, double> cp, ct;
  std::map<std::pair<int, int>, double> joint;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    cp[pred[i]] += 1;
    ct[truth[i]] += 1;
    joint[{pred[i], truth[i]}] += 1;
  }
  auto H = [n](const std::map<int, double>& c) {
    double h = 0;
    for (auto& [k, v] : c) h -= (v / n) * std::log(v / n);
    return h;
  };
  double h_t_given_p = 0, h_p_given_t = 0;
  for (auto& [k, v] : joint) {
    h_t_given_p -= (v / n) * std::log(v / cp[k.first]);
    h_p_given_t -= (v / n) * std::log(v / ct[k.second]);
  }
  const double ht = H(ct), hp = H(cp);
  const double hom = ht == 0 ? 1.0 : 1.0 - h_t_given_p / ht;
  const double com = hp == 0 ? 1.0 : 1.0 - h_p_given_t / hp;
  return hom + com == 0 ? 0.0 : 2 * hom * com / (hom + com);
}

// Minimax distance by depth-first enumeration of every simple path.
inline Dense minimax_all_paths(const Dense& d) {
  const std::size_t n = d.size();
  Dense out(n, std::vector<double>(n, 0.0));
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      if (s == t) continue;
      double best = INFINITY;
      std::vector<char> used(n, 0);
      std::function<void(std::size_t, double)> go = [&](std::size_t u, double mx) {
        if (mx >= best) return;
        if (u == t) {
          best = mx;
          return;
        }
        for (std::size_t v = 0; v < n; ++v) {
          if (used[v] || v == u) continue;
          used[v] = 1;
          go(v, std::max(mx, d[u][v]));
          used[v] = 0;
        }
      };
      used[s] = 1;
      go(s, 0.0);
      out[s][t] = best;
    }
  }
  return out;
}

inline double det(Dense m) {
  const std::size_t n = m.size();
  double d = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (m[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      d = -d;
    }
    d *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double k = m[r][c] / m[c][c];
      for (std::size_t q = c; q < n; ++q) m[r][q] -= k * m[c][q];
    }
  }
  return d;
}

// P(Y) = det(L_Y) / det(L + I) for every subset mask of a small ground set.
inline std::vector<double> dpp_subset_probs(const Dense& l) {
  const std::size_t m = l.size();
  Dense li = l;
  for (std::size_t i = 0; i < m; ++i) li[i][i] += 1.0;
  const double z = det(li);
  std::vector<double> p(std::size_t{1} << m);
  for (std::size_t mask = 0; mask < p.size(); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1) idx.push_back(i);
    Dense sub(idx.size(), std::vector<double>(idx.size()));
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) sub[a][b] = l[idx[a]][idx[b]];
    p[mask] = (idx.empty() ? 1.0 : det(sub)) / z;
  }
  return p;
}

// Strict local maximizers of x^T A x on the simplex for small n, found by
// solving the KKT system on every support and testing second-order
// conditions. Returns the supports.
inline std::vector<std::vector<std::size_t>> local_max_supports(const Dense& a) {
  const std::size_t n = a.size();
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) s.push_back(i);
    const std::size_t k = s.size();
    // [A_S  -1; 1^T 0] [x; lambda] = [0; 1]
    Dense m(k + 1, std::vector<double>(k + 2, 0.0));
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t q = 0; q < k; ++q) m[p][q] = a[s[p]][s[q]];
      m[p][k] = -1.0;
    }
    for (std::size_t q = 0; q < k; ++q) m[k][q] = 1.0;
    m[k][k + 1] = 1.0;
    // Gaussian elimination with partial pivoting.
    bool singular = false;
    for (std::size_t c = 0; c <= k; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r <= k; ++r)
        if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
      if (std::abs(m[piv][c]) < 1e-12) {
        singular = true;
        break;
      }
      std::swap(m[piv], m[c]);
      for (std::size_t r = 0; r <= k; ++r) {
        if (r == c) continue;
        const double f = m[r][c] / m[c][c];
        for (std::size_t q = c; q <= k + 1; ++q) m[r][q] -= f * m[c][q];
      }
    }
    if (singular) continue;
    std::vector<double> x(n, 0.0);
    bool positive = true;
    for (std::size_t p = 0; p < k; ++p) {
      x[s[p]] = m[p][k + 1] / m[p][p];
      if (!(x[s[p]] > 1e-12)) positive = false;
    }
    if (!positive) continue;
    const auto r = matvec(a, x);
    const double f = quad(a, x);
    bool kkt = true;
    for (std::size_t i = 0; i < n; ++i)
      if (!(mask >> i & 1) && r[i] >= f - 1e-12) kkt = false;
    if (!kkt) continue;
    // Second order: A_S negative definite on {d : sum d = 0}. With basis
    // b_p = e_p - e_last, M = B^T A_S B must have -M positive definite.
    bool concave = true;
    if (k >= 2) {
      const std::size_t q = k - 1;
      Dense mm(q, std::vector<double>(q));
      for (std::size_t p1 = 0; p1 < q; ++p1)
        for (std::size_t p2 = 0; p2 < q; ++p2)
          mm[p1][p2] = -(a[s[p1]][s[p2]] - a[s[p1]][s[q]] - a[s[q]][s[p2]] + a[s[q]][s[q]]);
      // Cholesky.
      for (std::size_t c = 0; c < q && concave; ++c) {
        double d = mm[c][c];
        for (std::size_t t = 0; t < c; ++t) d -= mm[c][t] * mm[c][t];
        if (!(d > 1e-12)) {
          concave = false;
          break;
        }
        mm[c][c] = std::sqrt(d);
        for (std::size_t r = c + 1; r < q; ++r) {
          double v = mm[r][c];
          for (std::size_t t = 0; t < c; ++t) v -= mm[r][t] * mm[c][t];
          mm[r][c] = v / mm[c][c];
        }
      }
    }
    if (concave) out.push_back(s);
  }
  return out;
}

}  // namespace oracle
