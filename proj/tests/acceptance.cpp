// Acceptance report: one PASS/FAIL line per criterion, details indented below.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <Eigen/Dense>

#include "dsfw/data.hpp"
#include "dsfw/diagnostics.hpp"
#include "dsfw/metrics.hpp"
#include "dsfw/multistart.hpp"
#include "dsfw/peel.hpp"
#include "dsfw/solver.hpp"
#include "support/oracles.hpp"

using namespace dsfw;

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& title, double seconds) {
  std::printf("%s C%d %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, title.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class... A>
void note(const char* fmt, A... a) {
  std::printf("    ");
  std::printf(fmt, a...);
  std::printf("\n");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SimilarityMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
  return new_similarity_matrix(oracle::random_symmetric(n, rng));
}

const SolverKind kFwFamily[] = {SolverKind::FW, SolverKind::PFW, SolverKind::AFW};

// ---------------------------------------------------------------------------
// C1-C4 share the same random runs.

struct RunStats {
  std::size_t runs = 0;
  std::size_t steps = 0;
  double worst_r = 0.0;
  double worst_f = 0.0;
  bool state_ok = true;
  std::size_t identity_checked = 0;
  std::size_t identity_bad = 0;
  std::size_t monotone_bad = 0;
  bool taxonomy_ok = true;
  std::size_t fw_non_good = 0;
  std::size_t afw_swaps = 0;
  std::size_t afw_drop_bound_bad = 0;
  std::size_t bound_checked = 0;
  std::size_t bound_bad = 0;
  std::size_t bound_trivial = 0;
};

void shared_runs(RunStats& st, double& secs) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  for (std::size_t n : {16, 64, 256}) {
    for (int rep = 0; rep < 50; ++rep) {
      const SimilarityMatrix a = random_matrix(n, rng);
      const OffDiagExtremes ext = offdiag_extremes(a);
      for (SolverKind kind : kFwFamily) {
        SolverConfig c;
        c.kind = kind;
        c.max_iters = 1000;
        RunResult rr = run(a, c, [&](const SolverState& s, const StepRecord&) {
          const StateReport rep = check_state(s, a);
          st.worst_r = std::max(st.worst_r, rep.r_deviation);
          st.worst_f = std::max(st.worst_f, rep.f_deviation / std::max(1.0, rep.f_dense));
          if (!rep.consistent(1e-8)) st.state_ok = false;
        });
        ++st.runs;
        st.steps += rr.trace.size();

        const ProgressReport pr = check_progress(rr.trace, ext);
        st.identity_checked += pr.checked;
        for (const auto& v : pr.violations) {
          if (v.what.find("decrease") != std::string::npos) ++st.monotone_bad;
          else ++st.identity_bad;
        }

        for (const auto& s : rr.trace) {
          if (kind == SolverKind::FW && s.kind != StepKind::FwGood) ++st.fw_non_good;
          if (kind == SolverKind::AFW && s.kind == StepKind::Swap) ++st.afw_swaps;
        }
        if (kind == SolverKind::PFW || rr.trace.empty()) continue;
        const BoundReport b =
            theorem_bound(rr.trace, kind, ext, rr.support0, n, 2.0 * rr.final_gap_half);
        if (kind == SolverKind::AFW && !b.drop_bound_ok) ++st.afw_drop_bound_bad;
        ++st.bound_checked;
        if (!b.satisfied) {
          ++st.bound_bad;
          note("bound violated: n=%zu rep=%d %s t=%zu min_gap=%.3e rhs=%.3e", n, rep,
               std::string(to_string(kind)).c_str(), b.t, b.min_gap, b.bound_value);
        }
        if (b.trivial) ++st.bound_trivial;
      }
    }
  }
  st.taxonomy_ok = st.fw_non_good == 0 && st.afw_swaps == 0 && st.afw_drop_bound_bad == 0;
  secs = seconds_since(t0);
}

// Pairwise bound on n = 4, where n! keeps it informative.
bool pairwise_small(std::size_t& checked, std::size_t& trivial) {
  std::mt19937_64 rng(77);
  bool ok = true;
  for (int rep = 0; rep < 200; ++rep) {
    const SimilarityMatrix a = random_matrix(4, rng);
    SolverConfig c;
    c.kind = SolverKind::PFW;
    c.init = rep % 2 ? InitKind::Barycenter : InitKind::Vertex;
    const RunResult rr = run(a, c);
    if (rr.trace.empty()) continue;
    const BoundReport b = theorem_bound(rr.trace, SolverKind::PFW, offdiag_extremes(a), rr.support0,
                                        4, 2.0 * rr.final_gap_half);
    ++checked;
    if (b.trivial) ++trivial;
    if (!b.satisfied) {
      ok = false;
      note("pairwise bound violated: rep=%d t=%zu min_gap=%.3e rhs=%.3e", rep, b.t, b.min_gap,
           b.bound_value);
    }
  }
  return ok;
}

// ---------------------------------------------------------------------------

void c5_decay() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::size_t T = 2000;
  std::vector<double> avg(T, 0.0);
  std::mt19937_64 rng(5150);
  std::size_t stopped_early = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const SimilarityMatrix a = random_matrix(64, rng);
    SolverConfig c;
    c.kind = SolverKind::FW;
    c.max_iters = T;
    const RunResult rr = run(a, c);
    auto curve = min_gap_curve(rr.trace);
    if (curve.size() < T) ++stopped_early;
    const double last_gap = 2.0 * rr.final_gap_half;
    double hold = curve.empty() ? last_gap : std::min(curve.back(), last_gap);
    for (std::size_t t = 0; t < T; ++t) avg[t] += (t < curve.size() ? curve[t] : hold) / 20.0;
  }
  std::vector<double> ts(T);
  std::iota(ts.begin(), ts.end(), 1.0);
  const DecayFit fit = decay_fit(ts, avg);
  note("slope %.3f (intercept %.3f), %zu of 20 runs reached the gap threshold early", fit.slope,
       fit.intercept, stopped_early);
  verdict(5, fit.slope <= -0.4, "FW min-gap decay slope <= -0.4 (n=64, t=2000)", seconds_since(t0));
}

// ---------------------------------------------------------------------------

struct Variant {
  const char* name;
  SolverKind kind;
  InitKind init;
};

const Variant kVariants[] = {
    {"FW", SolverKind::FW, InitKind::Vertex},
    {"PFW-B", SolverKind::PFW, InitKind::Barycenter},
    {"PFW-V", SolverKind::PFW, InitKind::Vertex},
    {"AFW-B", SolverKind::AFW, InitKind::Barycenter},
    {"AFW-V", SolverKind::AFW, InitKind::Vertex},
    {"RD", SolverKind::RD, InitKind::Barycenter},
};

// ari_table[p][variant], noise p = 0.1 .. 0.7
std::vector<std::vector<double>> c6_synthetic() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::vector<double>> table;
  bool ok = true;
  for (int pi = 1; pi <= 7; ++pi) {
    const double p = pi / 10.0;
    std::vector<double> row;
    std::string line;
    for (const Variant& v : kVariants) {
      double sum_ari = 0.0, sum_ar = 0.0;
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SyntheticSpec spec;
        spec.n = 200;
        spec.k = 5;
        spec.noise = p;
        spec.seed = seed;
        const auto data = block_noise_matrix(spec);
        PeelConfig pc;
        pc.max_clusters = 5;
        pc.cutoff = 2e-12;
        pc.solver.kind = v.kind;
        pc.solver.init = v.init;
        pc.solver.max_iters = 400;
        const ClusteringResult r = peel(data.a, pc);
        sum_ari += ari(r.labels, data.truth);
        sum_ar += r.assignment_rate();
      }
      const double mean = sum_ari / 5.0;
      row.push_back(mean);
      char buf[64];
      std::snprintf(buf, sizeof buf, " %s=%.3f/%.3f", v.name, mean, sum_ar / 5.0);
      line += buf;
      if (v.kind == SolverKind::RD) {
        if (pi == 2 && mean > 0.35) ok = false;
        if (pi >= 3 && mean > 0.05) ok = false;
      } else if (mean < 0.99) {
        ok = false;
      }
    }
    note("p=%.1f ARI/AR:%s", p, line.c_str());
    table.push_back(row);
  }
  verdict(6, ok, "block-noise ARI: FW variants >= 0.99, RD <= 0.35 (p=0.2) and <= 0.05 (p>=0.3)",
          seconds_since(t0));
  return table;
}

// ---------------------------------------------------------------------------

double median_iteration_ns(std::size_t n, SolverKind kind, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const SimilarityMatrix a = random_matrix(n, rng);
  SolverConfig c;
  c.kind = kind;
  c.init = kind == SolverKind::RD ? InitKind::Barycenter : InitKind::Vertex;
  c.max_iters = kind == SolverKind::RD ? 40 : 400;
  c.time_iterations = true;
  RunResult rr = run(a, c);
  auto ns = rr.iteration_ns;
  if (ns.empty()) return 0.0;
  std::nth_element(ns.begin(), ns.begin() + ns.size() / 2, ns.end());
  return ns[ns.size() / 2];
}

void c7_scaling() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  for (SolverKind kind : {SolverKind::FW, SolverKind::PFW, SolverKind::AFW, SolverKind::RD}) {
    const double small = median_iteration_ns(1000, kind, 1);
    const double large = median_iteration_ns(4000, kind, 2);
    const double ratio = large / small;
    const bool good = kind == SolverKind::RD ? ratio >= 10.0 : ratio <= 8.0;
    note("%s: median %.0f ns (n=1000) vs %.0f ns (n=4000), ratio %.2f", std::string(to_string(kind)).c_str(),
         small, large, ratio);
    ok = ok && good;
  }
  verdict(7, ok, "per-iteration time ratio n=4000/1000: <= 8 for FW/PFW/AFW, >= 10 for RD",
          seconds_since(t0));
}

// ---------------------------------------------------------------------------

// Restricted growth strings enumerate every set partition once.
void for_each_partition(std::size_t n, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> a(n, 1), mx(n, 1);
  while (true) {
    f(a);
    std::size_t i = n;
    while (i-- > 1) {
      if (a[i] <= mx[i - 1]) break;
    }
    if (i == 0 || i >= n) return;
    ++a[i];
    for (std::size_t j = i; j < n; ++j) {
      if (j > i) a[j] = 1;
      mx[j] = std::max(j ? mx[j - 1] : 1, a[j]);
    }
  }
}

void c8_metrics() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::size_t pairs = 0;
  double worst = 0.0;
  for (std::size_t n = 1; n <= 8; ++n) {
    std::vector<std::vector<int>> parts;
    for_each_partition(n, [&](const std::vector<int>& p) { parts.push_back(p); });
    std::mt19937_64 rng(n);
    // Every pair up to n = 6; beyond that every partition against 40 random ones.
    std::vector<std::size_t> truths(parts.size());
    std::iota(truths.begin(), truths.end(), 0);
    if (n > 6) {
      std::shuffle(truths.begin(), truths.end(), rng);
      truths.resize(40);
    }
    for (const auto& p : parts) {
      for (std::size_t ti : truths) {
        const double got = ari(p, parts[ti]);
        const double want = oracle::ari_pairs(p, parts[ti]);
        worst = std::max(worst, std::abs(got - want));
        ++pairs;
      }
    }
    note("n=%zu: %zu partitions", n, parts.size());
  }
  if (worst > 1e-12) ok = false;
  note("ARI vs pair counting: %zu pairs, max |diff| %.2e", pairs, worst);

  std::mt19937_64 rng(8);
  double worst_v = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 2 + rng() % 60;
    std::uniform_int_distribution<int> kp(1, 1 + static_cast<int>(rng() % 7));
    std::uniform_int_distribution<int> kt(1, 1 + static_cast<int>(rng() % 7));
    std::vector<int> p(n), t(n);
    for (auto& x : p) x = kp(rng);
    for (auto& x : t) x = kt(rng);
    worst_v = std::max(worst_v, std::abs(v_measure(p, t) - oracle::v_measure_entropy(p, t)));
  }
  if (worst_v > 1e-12) ok = false;
  note("V-measure vs entropy oracle: 1000 partitions, max |diff| %.2e", worst_v);

  std::size_t not_full = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SyntheticSpec spec;
    spec.noise = 0.1 * static_cast<double>(seed % 8);
    spec.seed = seed;
    const auto data = block_noise_matrix(spec);
    PeelConfig pc;
    pc.max_clusters = 1 + seed % 5;
    pc.solver.max_iters = 400;
    pc.post_assign = true;
    if (assignment_rate(peel(data.a, pc).labels) != 1.0) ++not_full;
  }
  if (not_full) ok = false;
  note("post_assign: %zu of 20 clusterings left objects unassigned", not_full);
  verdict(8, ok, "metric oracles (ARI exhaustive, V-measure 1e-12, post_assign AR = 1)",
          seconds_since(t0));
}

// ---------------------------------------------------------------------------

void c9_minimax() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(9);
  std::size_t mismatched = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rep % 7;
    oracle::Dense d = oracle::random_symmetric(n, rng, 0.0, 10.0);
    // Some ties, which stress the tree extraction.
    if (rep % 3 == 0)
      for (auto& row : d)
        for (auto& v : row) v = std::round(v);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) d[i][j] = d[j][i];
    const SquareMatrix got = minimax_distances(SquareMatrix::from_rows(d));
    const oracle::Dense want = oracle::minimax_all_paths(d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (got(i, j) != want[i][j]) {
          ++mismatched;
          i = j = n;
        }
  }
  note("%zu of 200 graphs differ from the all-paths oracle", mismatched);
  verdict(9, mismatched == 0, "minimax distances equal brute force exactly (200 graphs, n <= 8)",
          seconds_since(t0));
}

// ---------------------------------------------------------------------------

void c10_dpp() {
  const auto t0 = std::chrono::steady_clock::now();
  const oracle::Dense l = {{1.2, 0.5, 0.3, 0.1},
                           {0.5, 0.9, 0.2, 0.4},
                           {0.3, 0.2, 1.5, 0.6},
                           {0.1, 0.4, 0.6, 0.8}};
  Eigen::MatrixXd lm(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) lm(i, j) = l[i][j];
  const DppEnsemble ens = DppEnsemble::from_psd(lm);
  const auto probs = oracle::dpp_subset_probs(l);
  constexpr std::size_t draws = 100000;
  std::vector<double> counts(16, 0.0);
  Rng rng(10);
  for (std::size_t k = 0; k < draws; ++k) {
    std::size_t mask = 0;
    for (std::size_t i : dpp_sample(ens, rng)) mask |= std::size_t{1} << i;
    counts[mask] += 1.0;
  }
  double chi2 = 0.0;
  for (std::size_t m = 0; m < 16; ++m) {
    const double e = probs[m] * static_cast<double>(draws);
    chi2 += (counts[m] - e) * (counts[m] - e) / e;
  }
  boost::math::chi_squared dist(15.0);
  const double pval = boost::math::cdf(boost::math::complement(dist, chi2));
  note("chi-square %.2f on 15 dof, p = %.4f", chi2, pval);

  std::mt19937_64 g(11);
  double min_eig = INFINITY;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + rep % 60;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = rep % 2 ? normal(g) : std::abs(normal(g));
    const DppEnsemble dd = make_diagonally_dominant(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dd.likelihood, Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
  }
  note("smallest eigenvalue after the diagonal transform: %.3e (200 matrices)", min_eig);
  verdict(10, pval > 0.001 && min_eig >= -1e-9,
          "DPP subset frequencies (chi-square p > 0.001) and PSD transform", seconds_since(t0));
}

// ---------------------------------------------------------------------------

struct MsSummary {
  double passes = 0.0;
  double ari = 0.0;
  double ar = 0.0;
};

MsSummary multistart_cell(double p, SolverKind kind, Sampler sampler, double spacing, bool scale,
                          int repeats) {
  MsSummary s;
  for (int rep = 0; rep < repeats; ++rep) {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::GaussMix;
    spec.n = 1000;
    spec.k = 4;
    spec.noise = p;
    spec.seed = static_cast<std::uint64_t>(1000 + rep);
    spec.mean_spacing = spacing;
    const GaussData g = gauss_dataset(spec);
    const SimilarityMatrix a = max_transform(pairwise_euclidean(g.points));
    SamplePlan plan;
    plan.ell = 4;
    plan.sampler = sampler;
    plan.dpp_scale_to_ell = scale;
    plan.seed = static_cast<std::uint64_t>(77 + rep);
    SolverConfig c;
    c.kind = kind;
    const MultistartResult r = multistart_cluster(a, plan, c, 4, 2e-12);
    s.passes += static_cast<double>(r.passes) / repeats;
    s.ari += ari(r.clustering.labels, g.truth) / repeats;
    s.ar += r.clustering.assignment_rate() / repeats;
  }
  return s;
}

void c11_multistart() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  for (double p : {0.0, 0.2, 0.4}) {
    for (SolverKind kind : kFwFamily) {
      for (Sampler sampler : {Sampler::Uni, Sampler::Dpp}) {
        const MsSummary s = multistart_cell(p, kind, sampler, 250.0, true, 10);
        const bool good = s.passes <= 3.0 && s.ari >= 0.9;
        ok = ok && good;
        note("p=%.1f %s/%s: passes %.2f ARI %.3f AR %.3f%s", p, std::string(to_string(kind)).c_str(),
             sampler == Sampler::Dpp ? "dpp" : "uni", s.passes, s.ari, s.ar, good ? "" : "  <-");
      }
    }
  }
  verdict(11, ok, "multistart mean passes <= 3 and ARI >= 0.9 (Gaussians, n=1000)",
          seconds_since(t0));

  // Not part of the verdict: the same runs under the alternative settings.
  for (double p : {0.0, 0.4}) {
    const MsSummary tight = multistart_cell(p, SolverKind::FW, Sampler::Uni, 10.0, true, 3);
    note("info: spacing 10, p=%.1f FW/uni: passes %.2f ARI %.3f AR %.3f", p, tight.passes, tight.ari,
         tight.ar);
    const MsSummary raw = multistart_cell(p, SolverKind::PFW, Sampler::Dpp, 250.0, false, 3);
    note("info: unscaled DPP kernel, p=%.1f PFW/dpp: passes %.2f ARI %.3f AR %.3f", p, raw.passes,
         raw.ari, raw.ar);
  }
}

// ---------------------------------------------------------------------------

void c12_fw_beats_rd(const std::vector<std::vector<double>>& table) {
  bool ok = true;
  for (int pi : {3, 5}) {
    const auto& row = table[static_cast<std::size_t>(pi - 1)];
    const double rd = row.back();
    std::string line;
    for (std::size_t v = 0; v + 1 < row.size(); ++v) {
      if (!(row[v] > rd)) ok = false;
      char buf[48];
      std::snprintf(buf, sizeof buf, " %s %.3f", kVariants[v].name, row[v]);
      line += buf;
    }
    note("p=0.%d: RD %.3f vs%s", pi, rd, line.c_str());
  }
  verdict(12, ok, "at t=400 every FW variant's ARI exceeds RD's (p = 0.3, 0.5)", 0.0);
}

}  // namespace

int main() {
  RunStats st;
  double secs = 0.0;
  shared_runs(st, secs);
  note("%zu runs, %zu steps", st.runs, st.steps);
  note("max |r - Ax| %.2e, max |f - x'Ax| / max(1,f) %.2e", st.worst_r, st.worst_f);
  verdict(1, st.state_ok, "cached r and f match A x and x'Ax after every step", secs);

  note("%zu good steps checked, %zu identity violations, %zu decreases", st.identity_checked,
       st.identity_bad, st.monotone_bad);
  verdict(2, st.identity_bad == 0 && st.monotone_bad == 0,
          "per-step objective gain identities and monotone f", 0.0);

  note("FW non-good steps %zu, AFW swap steps %zu, AFW drop-bound violations %zu", st.fw_non_good,
       st.afw_swaps, st.afw_drop_bound_bad);
  verdict(3, st.taxonomy_ok, "step taxonomy and AFW drop-step bound", 0.0);

  const auto t4 = std::chrono::steady_clock::now();
  std::size_t pw_checked = 0, pw_trivial = 0;
  const bool pw_ok = pairwise_small(pw_checked, pw_trivial);
  note("FW/AFW: %zu traces, %zu violations, %zu with a trivial bound", st.bound_checked,
       st.bound_bad, st.bound_trivial);
  note("PFW n=4: %zu traces, %zu with a trivial bound", pw_checked, pw_trivial);
  verdict(4, st.bound_bad == 0 && pw_ok, "min-gap convergence bounds (FW, AFW, and PFW at n=4)",
          secs + seconds_since(t4));

  c5_decay();
  const auto table = c6_synthetic();
  c7_scaling();
  c8_metrics();
  c9_minimax();
  c10_dpp();
  c11_multistart();
  c12_fw_beats_rd(table);

  std::printf("%d of 12 criteria failed\n", failures);
  return failures;
}
