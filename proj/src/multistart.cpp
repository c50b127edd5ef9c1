#include "dsfw/multistart.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "dsfw/error.hpp"

namespace dsfw {

void SamplePlan::validate() const {
  if (ell < 1) fail(ErrorCode::InvalidConfig, "ell must be >= 1");
  if (!(overlap_threshold > 0.0 && overlap_threshold < 1.0))
    fail(ErrorCode::InvalidConfig, "overlap threshold must lie in (0,1)");
}

namespace {

// Object ids ordered by decreasing row sum, ties by index.
std::vector<std::size_t> by_row_sum(const SimilarityMatrix& a) {
  const auto sums = a.row_sums();
  std::vector<std::size_t> order(sums.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t p, std::size_t q) { return sums[p] > sums[q]; });
  return order;
}

// Block b of `blocks` near-equal contiguous blocks over m items.
std::pair<std::size_t, std::size_t> block_range(std::size_t b, std::size_t blocks, std::size_t m) {
  return {b * m / blocks, (b + 1) * m / blocks};
}

std::size_t uniform_index(std::size_t lo, std::size_t hi, Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(lo, hi - 1)(rng);
}

}  // namespace

std::vector<std::size_t> uniform_block_sample(const SimilarityMatrix& a, std::size_t ell,
                                              Rng& rng) {
  const std::size_t n = a.size();
  if (ell == 0) fail(ErrorCode::InvalidConfig, "ell must be >= 1");
  if (ell > n) {
    fail(ErrorCode::TooManySeeds,
         "cannot draw " + std::to_string(ell) + " seeds from " + std::to_string(n) + " objects");
  }
  const auto order = by_row_sum(a);
  std::vector<std::size_t> out;
  out.reserve(ell);
  for (std::size_t b = 0; b < ell; ++b) {
    const auto [lo, hi] = block_range(b, ell, n);
    out.push_back(order[uniform_index(lo, hi, rng)]);
  }
  return out;
}

DppEnsemble DppEnsemble::from_psd(Eigen::MatrixXd l) {
  if (l.rows() != l.cols()) fail(ErrorCode::NotSquare, "likelihood must be square");
  if (!l.isApprox(l.transpose(), 1e-12) && (l - l.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    fail(ErrorCode::AsymmetricMatrix, "likelihood must be symmetric");
  DppEnsemble e;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
  if (es.info() != Eigen::Success) fail(ErrorCode::InvariantViolated, "eigendecomposition failed");
  e.eigenvalues = es.eigenvalues();
  for (Eigen::Index k = 0; k < e.eigenvalues.size(); ++k) {
    if (e.eigenvalues[k] < -1e-9)
      fail(ErrorCode::InvariantViolated, "likelihood is not positive semidefinite");
    e.eigenvalues[k] = std::max(0.0, e.eigenvalues[k]);
  }
  e.eigenvectors = es.eigenvectors();
  e.likelihood = std::move(l);
  return e;
}

DppEnsemble make_diagonally_dominant(const Eigen::MatrixXd& l) {
  if (l.rows() != l.cols()) fail(ErrorCode::NotSquare, "likelihood must be square");
  const Eigen::Index m = l.rows();
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j)
      if (std::abs(l(i, j) - l(j, i)) > SimilarityMatrix::kSymmetryTol)
        fail(ErrorCode::AsymmetricMatrix, "likelihood must be symmetric");
  const double biggest = m > 0 ? l.cwiseAbs().maxCoeff() : 0.0;
  const double margin = biggest > 0.0 ? 1e-9 * biggest : 1e-9;
  Eigen::MatrixXd out = l;
  for (Eigen::Index i = 0; i < m; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < m; ++j)
      if (j != i) s += std::abs(l(i, j));
    out(i, i) = s + margin;
  }
  return DppEnsemble::from_psd(std::move(out));
}

std::vector<std::size_t> dpp_sample(const DppEnsemble& ens, Rng& rng) {
  const Eigen::Index m = ens.eigenvalues.size();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Eigen::Index> chosen;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double lam = ens.eigenvalues[k];
    if (u(rng) < lam / (1.0 + lam)) chosen.push_back(k);
  }
  Eigen::MatrixXd v(m, static_cast<Eigen::Index>(chosen.size()));
  for (std::size_t c = 0; c < chosen.size(); ++c)
    v.col(static_cast<Eigen::Index>(c)) = ens.eigenvectors.col(chosen[c]);

  std::vector<std::size_t> out;
  while (v.cols() > 0) {
    const Eigen::Index k = v.cols();
    const Eigen::VectorXd w = v.rowwise().squaredNorm() / static_cast<double>(k);
    const double total = w.sum();
    double target = u(rng) * total;
    Eigen::Index item = m - 1;
    for (Eigen::Index i = 0; i < m; ++i) {
      target -= w[i];
      if (target < 0.0) {
        item = i;
        break;
      }
    }
    out.push_back(static_cast<std::size_t>(item));

    // Project the basis onto the complement of e_item.
    Eigen::Index pivot = 0;
    v.row(item).cwiseAbs().maxCoeff(&pivot);
    const Eigen::VectorXd pv = v.col(pivot);
    Eigen::MatrixXd next(m, k - 1);
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (j == pivot) continue;
      next.col(c++) = v.col(j) - pv * (v(item, j) / pv[item]);
    }
    for (Eigen::Index j = 0; j < next.cols(); ++j) {
      for (Eigen::Index q = 0; q < j; ++q) next.col(j) -= next.col(q).dot(next.col(j)) * next.col(q);
      const double nrm = next.col(j).norm();
      if (nrm > 0.0) next.col(j) /= nrm;
    }
    v = std::move(next);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DppEnsemble scale_to_expected_size(const DppEnsemble& ens, double k) {
  Eigen::Index positive = 0;
  for (Eigen::Index i = 0; i < ens.eigenvalues.size(); ++i) positive += ens.eigenvalues[i] > 0.0;
  if (!(k > 0.0) || k >= static_cast<double>(positive))
    fail(ErrorCode::InvalidConfig, "expected size must lie strictly between 0 and the kernel rank");
  auto expected = [&](double alpha) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < ens.eigenvalues.size(); ++i) {
      const double l = alpha * ens.eigenvalues[i];
      s += l / (1.0 + l);
    }
    return s;
  };
  double lo = 0.0, hi = 1.0;
  while (expected(hi) < k && hi < 1e300) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (expected(mid) < k ? lo : hi) = mid;
  }
  DppEnsemble out = ens;
  out.likelihood *= hi;
  out.eigenvalues *= hi;
  return out;
}

std::vector<std::size_t> two_step_pool(const SimilarityMatrix& a, Rng& rng) {
  const std::size_t n = a.size();
  if (n == 0) fail(ErrorCode::PoolTooSmall, "empty matrix");
  const std::size_t blocks = std::min<std::size_t>(10, n);
  const double c = std::cbrt(static_cast<double>(n));
  const auto per_block = static_cast<std::size_t>(std::max(1.0, std::ceil(c * c / 10.0 - 1e-9)));
  const auto order = by_row_sum(a);
  std::vector<std::size_t> pool;
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto [lo, hi] = block_range(b, blocks, n);
    std::vector<std::size_t> members(order.begin() + static_cast<std::ptrdiff_t>(lo),
                                     order.begin() + static_cast<std::ptrdiff_t>(hi));
    const std::size_t take = std::min(per_block, members.size());
    std::sample(members.begin(), members.end(), std::back_inserter(pool), take, rng);
  }
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<std::size_t> two_step_dpp_sample(const SimilarityMatrix& a, std::size_t ell,
                                             Rng& rng, bool scale_kernel) {
  if (ell == 0) fail(ErrorCode::InvalidConfig, "ell must be >= 1");
  const auto pool = two_step_pool(a, rng);
  if (pool.size() < ell) {
    fail(ErrorCode::PoolTooSmall, "stage-one pool has " + std::to_string(pool.size()) +
                                      " objects, need " + std::to_string(ell));
  }
  const auto m = static_cast<Eigen::Index>(pool.size());
  Eigen::MatrixXd l(m, m);
  for (Eigen::Index p = 0; p < m; ++p)
    for (Eigen::Index q = 0; q < m; ++q)
      l(p, q) = a(pool[static_cast<std::size_t>(p)], pool[static_cast<std::size_t>(q)]);
  DppEnsemble ens = make_diagonally_dominant(l);
  if (scale_kernel && static_cast<Eigen::Index>(ell) < (ens.eigenvalues.array() > 0.0).count())
    ens = scale_to_expected_size(ens, static_cast<double>(ell));
  std::vector<std::size_t> picked = dpp_sample(ens, rng);  // positions in pool

  if (picked.size() > ell) {
    std::stable_sort(picked.begin(), picked.end(), [&](std::size_t p, std::size_t q) {
      return ens.likelihood(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)) >
             ens.likelihood(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
    });
    picked.resize(ell);
  } else if (picked.size() < ell) {
    // Top up from the unpicked part of the pool, by row-sum blocks.
    std::vector<std::size_t> rest;
    for (std::size_t p = 0; p < pool.size(); ++p)
      if (!std::binary_search(picked.begin(), picked.end(), p)) rest.push_back(p);
    const auto sub = a.submatrix([&] {
      std::vector<std::size_t> ids;
      for (std::size_t p : rest) ids.push_back(pool[p]);
      return ids;
    }());
    for (std::size_t k : uniform_block_sample(sub, ell - picked.size(), rng))
      picked.push_back(rest[k]);
  }
  std::vector<std::size_t> out;
  out.reserve(picked.size());
  for (std::size_t p : picked) out.push_back(pool[p]);
  return out;
}

SeedStarts seed_starting_points(std::size_t i, std::size_t n) {
  if (n < 2) fail(ErrorCode::TooSmall, "seed starts need n >= 2");
  if (i >= n) fail(ErrorCode::DimensionMismatch, "seed index out of range");
  std::vector<double> b(n, 0.5 / static_cast<double>(n - 1));
  b[i] = 0.5;
  double s = 0.0;
  for (double v : b) s += v;
  for (double& v : b) v /= s;
  return {SimplexPoint::vertex(n, i), SimplexPoint::from_coords(std::move(b))};
}

double overlap_fraction(const std::vector<std::size_t>& candidate,
                        const std::vector<std::size_t>& accepted, OverlapMeasure m) {
  if (candidate.empty()) return 0.0;
  std::vector<std::size_t> common;
  std::set_intersection(candidate.begin(), candidate.end(), accepted.begin(), accepted.end(),
                        std::back_inserter(common));
  const double inter = static_cast<double>(common.size());
  if (m == OverlapMeasure::Candidate) return inter / static_cast<double>(candidate.size());
  const double uni = static_cast<double>(candidate.size() + accepted.size()) - inter;
  return inter / uni;
}

namespace {

struct Candidate {
  std::size_t order = 0;  // launch order, breaks f ties
  RunResult result;
};

bool use_vertex(StartPolicy p) {
  switch (p) {
    case StartPolicy::Default: return true;
    case StartPolicy::VertexOnly: return true;
    case StartPolicy::BiasedOnly: return false;
    case StartPolicy::Both: return true;
  }
  return true;
}

bool use_biased(StartPolicy p, SolverKind k) {
  switch (p) {
    case StartPolicy::Default: return k != SolverKind::FW;
    case StartPolicy::VertexOnly: return false;
    case StartPolicy::BiasedOnly: return true;
    case StartPolicy::Both: return true;
  }
  return false;
}

}  // namespace

MultistartResult multistart_cluster(const SimilarityMatrix& a, const SamplePlan& plan,
                                    const SolverConfig& solver, std::size_t max_clusters,
                                    double cutoff) {
  plan.validate();
  solver.validate();
  if (max_clusters < 1) fail(ErrorCode::InvalidConfig, "max_clusters must be >= 1");
  if (!(cutoff > 0.0)) fail(ErrorCode::InvalidConfig, "cutoff must be positive");

  const std::size_t n = a.size();
  MultistartResult out;
  ClusteringResult& res = out.clustering;
  res.labels.assign(n, 0);
  std::vector<std::size_t> surviving(n);
  std::iota(surviving.begin(), surviving.end(), std::size_t{0});
  Rng rng(plan.seed);

  while (res.clusters.size() < max_clusters && !surviving.empty()) {
    ++out.passes;
    if (surviving.size() == 1) {
      ClusterRecord rec;
      rec.members = surviving;
      rec.surviving = surviving;
      rec.characteristic = SimplexPoint::vertex(1, 0);
      rec.stop = StopReason::GapReached;
      res.labels[surviving[0]] = static_cast<int>(res.clusters.size()) + 1;
      res.assigned_count += 1;
      res.clusters.push_back(std::move(rec));
      break;
    }

    const SimilarityMatrix sub = a.submatrix(surviving);
    const std::size_t m = sub.size();
    const std::size_t ell = std::min(plan.ell, m);
    const auto seeds = plan.sampler == Sampler::Uni ? uniform_block_sample(sub, ell, rng)
                                                    : two_step_dpp_sample(sub, ell, rng, plan.dpp_scale_to_ell);

    std::vector<SimplexPoint> starts;
    for (std::size_t s : seeds) {
      auto st = seed_starting_points(s, m);
      if (use_vertex(plan.starts)) starts.push_back(std::move(st.vertex));
      if (use_biased(plan.starts, solver.kind)) starts.push_back(std::move(st.biased));
    }

    std::vector<std::future<RunResult>> futures;
    futures.reserve(starts.size());
    for (auto& st : starts) {
      SolverConfig c = solver;
      c.init = InitKind::Custom;
      c.custom_start = std::move(st);
      futures.push_back(std::async(std::launch::async, [&sub, c = std::move(c)] {
        return run(sub, c);
      }));
    }
    std::vector<Candidate> cands;
    cands.reserve(futures.size());
    for (std::size_t k = 0; k < futures.size(); ++k) cands.push_back({k, futures[k].get()});
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& p, const Candidate& q) {
      return p.result.f > q.result.f;
    });

    std::vector<std::size_t> accepted_union;  // original ids, ascending
    std::vector<std::vector<std::size_t>> accepted;
    const std::size_t before = res.clusters.size();
    for (auto& cand : cands) {
      if (res.clusters.size() >= max_clusters) break;
      std::vector<std::size_t> supp;
      try {
        supp = extract_support(cand.result.x, cutoff, surviving);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyCluster) throw;
        continue;
      }
      double ov = 0.0;
      if (plan.overlap == OverlapMeasure::Candidate) {
        ov = overlap_fraction(supp, accepted_union, OverlapMeasure::Candidate);
      } else {
        for (const auto& acc : accepted)
          ov = std::max(ov, overlap_fraction(supp, acc, OverlapMeasure::Jaccard));
      }
      if (ov > plan.overlap_threshold) continue;

      // Objects already claimed this pass stay with the earlier cluster.
      std::vector<std::size_t> members;
      std::set_difference(supp.begin(), supp.end(), accepted_union.begin(), accepted_union.end(),
                          std::back_inserter(members));
      if (members.empty()) continue;

      const int label = static_cast<int>(res.clusters.size()) + 1;
      for (std::size_t id : members) res.labels[id] = label;
      res.assigned_count += members.size();

      std::vector<std::size_t> merged;
      std::set_union(accepted_union.begin(), accepted_union.end(), members.begin(), members.end(),
                     std::back_inserter(merged));
      accepted_union = std::move(merged);
      accepted.push_back(supp);

      ClusterRecord rec;
      rec.members = std::move(members);
      rec.surviving = surviving;
      rec.objective = cand.result.f;
      rec.iterations = cand.result.trace.size();
      rec.stop = cand.result.stop;
      rec.iteration_ns = std::move(cand.result.iteration_ns);
      rec.characteristic = std::move(cand.result.x);
      res.clusters.push_back(std::move(rec));
    }
    if (res.clusters.size() == before) break;  // nothing extractable

    std::vector<std::size_t> next;
    std::set_difference(surviving.begin(), surviving.end(), accepted_union.begin(),
                        accepted_union.end(), std::back_inserter(next));
    surviving = std::move(next);
  }
  return out;
}

}  // namespace dsfw
