#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "dsfw/data.hpp"
#include "dsfw/diagnostics.hpp"
#include "dsfw/error.hpp"
#include "dsfw/io.hpp"
#include "dsfw/metrics.hpp"
#include "dsfw/multistart.hpp"
#include "dsfw/peel.hpp"
#include "dsfw/solver.hpp"

using json = nlohmann::ordered_json;
using namespace dsfw;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

class Manifest {
 public:
  using Clock = std::chrono::steady_clock;

  json doc = json::object();

  void input(const std::string& path) { doc["inputs"][path] = sha256_file(path); }

  template <class F>
  auto phase(const std::string& name, F&& f) {
    const auto t0 = Clock::now();
    struct Stop {
      Manifest* m;
      std::string name;
      Clock::time_point t0;
      ~Stop() {
        m->doc["phases_ms"][name] =
            std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      }
    } stop{this, name, t0};
    return f();
  }

  void iterations(const std::vector<ClusterRecord>& clusters) {
    std::vector<double> ns;
    for (const auto& c : clusters) ns.insert(ns.end(), c.iteration_ns.begin(), c.iteration_ns.end());
    json s = {{"count", ns.size()}};
    if (!ns.empty()) {
      std::sort(ns.begin(), ns.end());
      double sum = 0.0;
      for (double v : ns) sum += v;
      s["mean_ns"] = sum / static_cast<double>(ns.size());
      s["median_ns"] = ns[ns.size() / 2];
      s["min_ns"] = ns.front();
      s["max_ns"] = ns.back();
    }
    doc["iteration_timing"] = s;
  }

  void write(const std::string& explicit_path, const std::string& output) const {
    const std::string path =
        !explicit_path.empty() ? explicit_path : (output.empty() ? "" : output + ".manifest.json");
    if (path.empty()) {
      std::cerr << doc.dump(2) << '\n';
      return;
    }
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path);
    out << doc.dump(2) << '\n';
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  return out;
}

void emit(const json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
  }
}

json labels_json(const ClusteringResult& r) {
  return {{"labels", r.labels}, {"k_found", r.k_found()}, {"assignment_rate", r.assignment_rate()}};
}

// ---------------------------------------------------------------------------

struct SolverChoice {
  SolverKind kind = SolverKind::FW;
  InitKind init = InitKind::Vertex;
  StartPolicy starts = StartPolicy::Default;
};

const std::map<std::string, SolverChoice> kSolvers = {
    {"fw", {SolverKind::FW, InitKind::Vertex, StartPolicy::Default}},
    {"fw-b", {SolverKind::FW, InitKind::Barycenter, StartPolicy::BiasedOnly}},
    {"fw-v", {SolverKind::FW, InitKind::Vertex, StartPolicy::VertexOnly}},
    {"pfw", {SolverKind::PFW, InitKind::Vertex, StartPolicy::Default}},
    {"pfw-b", {SolverKind::PFW, InitKind::Barycenter, StartPolicy::BiasedOnly}},
    {"pfw-v", {SolverKind::PFW, InitKind::Vertex, StartPolicy::VertexOnly}},
    {"afw", {SolverKind::AFW, InitKind::Vertex, StartPolicy::Default}},
    {"afw-b", {SolverKind::AFW, InitKind::Barycenter, StartPolicy::BiasedOnly}},
    {"afw-v", {SolverKind::AFW, InitKind::Vertex, StartPolicy::VertexOnly}},
    {"rd", {SolverKind::RD, InitKind::Barycenter, StartPolicy::Default}},
};

std::vector<std::string> solver_names() {
  std::vector<std::string> v;
  for (const auto& [k, _] : kSolvers) v.push_back(k);
  return v;
}

struct Source {
  std::string input;
  std::string features;
  bool hsv = false;
  std::string method = "cosine";
  double shift = 0.0;

  void add(CLI::App* app, bool required) {
    auto* g = app->add_option_group("source");
    g->add_option("--input", input, "similarity matrix CSV")->check(CLI::ExistingFile);
    g->add_option("--features", features, "feature CSV")->check(CLI::ExistingFile);
    g->require_option(required ? 1 : 0, 1);
    app->add_flag("--hsv", hsv, "feature rows are h,s,v pixels");
    app->add_option("--similarity,--method", method, "feature similarity")
        ->check(CLI::IsMember({"cosine", "euclidean-max", "minimax"}));
    app->add_option("--shift", shift, "added to every off-diagonal similarity");
  }

  FeatureMatrix load_features() const {
    if (!hsv) return io::read_features(features);
    const auto px = io::read_hsv(features);
    return hsv_features(px);
  }

  SimilarityMatrix build(const FeatureMatrix& f) const {
    if (method == "cosine") return cosine_similarity(f, shift);
    SquareMatrix d = pairwise_euclidean(f);
    if (method == "minimax") d = minimax_distances(d);
    SimilarityMatrix a = max_transform(d);
    return shift != 0.0 ? a.shifted(shift) : a;
  }

  SimilarityMatrix load(Manifest& m) const {
    if (!input.empty()) {
      m.input(input);
      return m.phase("load", [&] {
        SimilarityMatrix a(io::read_matrix(input));
        return shift != 0.0 ? a.shifted(shift) : a;
      });
    }
    m.input(features);
    const auto f = m.phase("load", [&] { return load_features(); });
    return m.phase("similarity", [&] { return build(f); });
  }

  json flags() const {
    json j;
    if (!input.empty()) j["input"] = input;
    if (!features.empty()) {
      j["features"] = features;
      j["hsv"] = hsv;
      j["similarity"] = method;
    }
    j["shift"] = shift;
    return j;
  }
};

struct SolverFlags {
  std::string solver = "fw";
  std::string init = "auto";
  std::size_t max_iters = 1000;
  double epsilon = std::numeric_limits<double>::epsilon();
  double cutoff = 2e-12;
  std::size_t max_clusters = 1;

  void add(CLI::App* app) {
    app->add_option("--solver", solver)->check(CLI::IsMember(solver_names()));
    app->add_option("--init", init, "auto follows the solver suffix")
        ->check(CLI::IsMember({"auto", "barycenter", "vertex"}));
    app->add_option("--max-iters", max_iters);
    app->add_option("--epsilon", epsilon);
    app->add_option("--cutoff", cutoff);
    app->add_option("--max-clusters", max_clusters);
  }

  SolverConfig config() const {
    const SolverChoice& c = kSolvers.at(solver);
    SolverConfig s;
    s.kind = c.kind;
    s.init = init == "auto" ? c.init : (init == "vertex" ? InitKind::Vertex : InitKind::Barycenter);
    s.max_iters = max_iters;
    s.epsilon = epsilon;
    s.time_iterations = true;
    return s;
  }

  json flags() const {
    return {{"solver", solver},   {"init", init},       {"max_iters", max_iters},
            {"epsilon", epsilon}, {"cutoff", cutoff},   {"max_clusters", max_clusters}};
  }
};

struct Common {
  std::string output;
  std::string manifest;
  std::uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--output,-o", output, "result path (stdout if omitted)");
    app->add_option("--manifest", manifest, "manifest path (default <output>.manifest.json)");
    app->add_option("--seed", seed);
  }
};

std::string round_path(const std::string& path, std::size_t round) {
  if (round == 0) return path;
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  const std::string tag = "-" + std::to_string(round + 1);
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + tag;
  return path.substr(0, dot) + tag + path.substr(dot);
}

// ---------------------------------------------------------------------------

struct ClusterCmd {
  Source src;
  SolverFlags sf;
  Common common;
  bool post = false;
  std::string trace;
  std::string labels_csv;

  void add(CLI::App* app) {
    src.add(app, true);
    sf.add(app);
    common.add(app);
    app->add_flag("--post-assign", post, "attach leftover objects to the closest cluster");
    app->add_option("--trace", trace, "trace CSV of the first round (later rounds get -2, -3, ...)");
    app->add_option("--labels-csv", labels_csv);
  }

  int run() const {
    Manifest m;
    m.doc["subcommand"] = "cluster";
    json fl = src.flags();
    fl.update(sf.flags());
    fl["post_assign"] = post;
    m.doc["flags"] = fl;
    m.doc["seed"] = common.seed;

    const SimilarityMatrix a = src.load(m);
    PeelConfig pc;
    pc.solver = sf.config();
    pc.max_clusters = sf.max_clusters;
    pc.cutoff = sf.cutoff;
    pc.post_assign = post;
    pc.keep_traces = !trace.empty();
    const ClusteringResult r = m.phase("cluster", [&] { return peel(a, pc); });

    for (std::size_t i = 0; i < r.traces.size(); ++i) {
      auto out = open_out(round_path(trace, i));
      io::write_trace(out, r.traces[i]);
    }
    if (!labels_csv.empty()) {
      auto out = open_out(labels_csv);
      io::write_labels(out, r.labels);
    }
    json rounds = json::array();
    for (const auto& c : r.clusters)
      rounds.push_back({{"size", c.members.size()},
                        {"objective", c.objective},
                        {"iterations", c.iterations},
                        {"stop", to_string(c.stop)}});
    m.doc["rounds"] = rounds;
    m.iterations(r.clusters);
    emit(labels_json(r), common.output);
    m.write(common.manifest, common.output);
    return kOk;
  }
};

struct MultistartCmd {
  Source src;
  SolverFlags sf;
  Common common;
  std::size_t samples = 4;
  std::string sampler = "uni";
  double overlap = 0.10;
  std::string measure = "candidate";
  bool dpp_raw = false;
  bool post = false;

  void add(CLI::App* app) {
    src.add(app, true);
    sf.add(app);
    common.add(app);
    app->add_option("--samples", samples, "seeds per pass");
    app->add_option("--sampler", sampler)->check(CLI::IsMember({"uni", "dpp"}));
    app->add_option("--overlap", overlap, "largest accepted overlap fraction");
    app->add_option("--overlap-measure", measure)->check(CLI::IsMember({"candidate", "jaccard"}));
    app->add_flag("--dpp-raw", dpp_raw, "skip rescaling the DPP kernel to the sample size");
    app->add_flag("--post-assign", post);
  }

  int run() const {
    Manifest m;
    m.doc["subcommand"] = "multistart";
    json fl = src.flags();
    fl.update(sf.flags());
    fl.update(json{{"samples", samples},
                   {"sampler", sampler},
                   {"overlap", overlap},
                   {"overlap_measure", measure},
                   {"dpp_raw", dpp_raw},
                   {"post_assign", post}});
    m.doc["flags"] = fl;
    m.doc["seed"] = common.seed;

    const SimilarityMatrix a = src.load(m);
    SamplePlan plan;
    plan.ell = samples;
    plan.sampler = sampler == "dpp" ? Sampler::Dpp : Sampler::Uni;
    plan.overlap_threshold = overlap;
    plan.overlap = measure == "jaccard" ? OverlapMeasure::Jaccard : OverlapMeasure::Candidate;
    plan.starts = kSolvers.at(sf.solver).starts;
    plan.dpp_scale_to_ell = !dpp_raw;
    plan.seed = common.seed;
    MultistartResult r = m.phase("multistart", [&] {
      return multistart_cluster(a, plan, sf.config(), sf.max_clusters, sf.cutoff);
    });
    if (post && !r.clustering.clusters.empty())
      r.clustering = m.phase("post_assign", [&] { return post_assign(std::move(r.clustering), a); });

    m.iterations(r.clustering.clusters);
    m.doc["passes"] = r.passes;
    json j = labels_json(r.clustering);
    j["passes"] = r.passes;
    emit(j, common.output);
    m.write(common.manifest, common.output);
    return kOk;
  }
};

struct SynthCmd {
  std::string kind = "block";
  SyntheticSpec spec;
  std::string matrix;
  std::string truth;
  std::string points;
  std::string manifest;
  CLI::Option* k_opt = nullptr;

  void add(CLI::App* app) {
    app->add_option("--kind", kind)->check(CLI::IsMember({"block", "gauss"}));
    app->add_option("--n", spec.n);
    k_opt = app->add_option("--k", spec.k, "block: clusters (gauss always has 4)");
    app->add_option("--noise", spec.noise, "block: noise level; gauss: background fraction");
    app->add_option("--seed", spec.seed);
    app->add_option("--spacing", spec.mean_spacing, "gauss: distance between means");
    app->add_flag("--background-zero", spec.background_as_zero, "gauss: truth 0 for background");
    app->add_option("--matrix", matrix, "similarity matrix CSV")->required();
    app->add_option("--truth", truth, "truth labels CSV")->required();
    app->add_option("--points", points, "gauss: write the 2-d points");
    app->add_option("--manifest", manifest);
  }

  int run() {
    Manifest m;
    m.doc["subcommand"] = "synth";
    spec.kind = kind == "gauss" ? SyntheticKind::GaussMix : SyntheticKind::BlockNoise;
    if (spec.kind == SyntheticKind::GaussMix && k_opt->count() == 0) spec.k = 4;
    m.doc["flags"] = {{"kind", kind},       {"n", spec.n},
                      {"k", spec.k},        {"noise", spec.noise},
                      {"spacing", spec.mean_spacing},
                      {"background_zero", spec.background_as_zero}};
    m.doc["seed"] = spec.seed;

    std::vector<int> labels;
    std::optional<SimilarityMatrix> a;
    if (spec.kind == SyntheticKind::BlockNoise) {
      auto d = m.phase("generate", [&] { return block_noise_matrix(spec); });
      a = std::move(d.a);
      labels = std::move(d.truth);
    } else {
      auto d = m.phase("generate", [&] { return gauss_dataset(spec); });
      a = m.phase("similarity", [&] { return max_transform(pairwise_euclidean(d.points)); });
      labels = std::move(d.truth);
      if (!points.empty()) {
        auto out = open_out(points);
        io::write_features(out, d.points);
      }
    }
    m.phase("write", [&] {
      auto out = open_out(matrix);
      io::write_matrix(out, *a);
      auto t = open_out(truth);
      io::write_labels(t, labels);
      return 0;
    });
    m.write(manifest, matrix);
    return kOk;
  }
};

struct SimilarityCmd {
  Source src;
  std::string output;
  std::string manifest;

  void add(CLI::App* app) {
    src.add(app, true);
    app->add_option("--output,-o", output, "matrix CSV")->required();
    app->add_option("--manifest", manifest);
  }

  int run() const {
    Manifest m;
    m.doc["subcommand"] = "similarity";
    m.doc["flags"] = src.flags();
    m.doc["seed"] = 0;
    const SimilarityMatrix a = src.load(m);
    auto out = open_out(output);
    io::write_matrix(out, a);
    m.write(manifest, output);
    return kOk;
  }
};

struct EvalCmd {
  std::string pred;
  std::string truth;
  bool as_cluster = false;
  Common common;

  void add(CLI::App* app) {
    app->add_option("--pred", pred)->required()->check(CLI::ExistingFile);
    app->add_option("--truth", truth)->required()->check(CLI::ExistingFile);
    app->add_flag("--unassigned-as-cluster", as_cluster, "score label 0 as a cluster");
    common.add(app);
  }

  int run() const {
    Manifest m;
    m.doc["subcommand"] = "eval";
    m.doc["flags"] = {{"pred", pred}, {"truth", truth}, {"unassigned_as_cluster", as_cluster}};
    m.doc["seed"] = common.seed;
    m.input(pred);
    m.input(truth);
    const auto p = io::read_labels(pred);
    const auto t = io::read_labels(truth);
    const Unassigned mode = as_cluster ? Unassigned::AsCluster : Unassigned::Exclude;
    const json j = m.phase("eval", [&] {
      return json{{"ar", assignment_rate(p)},
                  {"ari", ari(p, t, mode)},
                  {"v_measure", v_measure(p, t, mode)}};
    });
    emit(j, common.output);
    m.write(common.manifest, common.output);
    return kOk;
  }
};

struct TraceCheckCmd {
  std::string trace;
  std::string matrix;
  std::string solver = "fw";
  std::size_t support0 = 1;
  std::optional<double> final_gap;
  Common common;

  void add(CLI::App* app) {
    app->add_option("--trace", trace)->required()->check(CLI::ExistingFile);
    app->add_option("--matrix,--input", matrix)->required()->check(CLI::ExistingFile);
    app->add_option("--solver", solver)->check(CLI::IsMember({"fw", "pfw", "afw"}));
    app->add_option("--support0", support0, "support size of the starting point");
    app->add_option("--final-gap", final_gap, "full gap at the returned iterate");
    common.add(app);
  }

  int run() const {
    Manifest m;
    m.doc["subcommand"] = "trace-check";
    m.doc["flags"] = {{"trace", trace}, {"matrix", matrix}, {"solver", solver}, {"support0", support0}};
    m.doc["seed"] = common.seed;
    m.input(trace);
    m.input(matrix);
    const SimilarityMatrix a(io::read_matrix(matrix));
    const auto steps = io::read_trace(trace);
    const OffDiagExtremes ext = offdiag_extremes(a);
    const SolverKind kind = kSolvers.at(solver).kind;
    const BoundReport b = theorem_bound(steps, kind, ext, support0, a.size(), final_gap);
    const ProgressReport pr = check_progress(steps, ext);

    json j = {{"t", b.t},
              {"min_gap", b.min_gap},
              {"bound_value", b.bound_value},
              {"satisfied", b.satisfied},
              {"trivial", b.trivial},
              {"beta", b.beta},
              {"good_steps", b.good_steps},
              {"drop_steps", b.drop_steps},
              {"swap_steps", b.swap_steps},
              {"support0", b.support0},
              {"f0", b.f0},
              {"ft", b.ft},
              {"drop_bound_ok", b.drop_bound_ok}};
    json viol = json::array();
    for (const auto& v : pr.violations)
      viol.push_back({{"t", v.t},
                      {"kind", to_string(v.kind)},
                      {"what", v.what},
                      {"observed", v.observed},
                      {"predicted", v.predicted}});
    j["progress"] = {{"checked", pr.checked}, {"ok", pr.ok()}, {"violations", viol}};
    emit(j, common.output);
    m.write(common.manifest, common.output);
    return kOk;
  }
};

int report(const Error& e) {
  json j = {{"error", to_string(e.code())}, {"message", e.what()}};
  std::cerr << j.dump() << '\n';
  return is_numeric(e.code()) ? kNumeric : kData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dominant-set clustering with Frank-Wolfe solvers"};
  app.require_subcommand(1);

  ClusterCmd cluster;
  MultistartCmd multistart;
  SynthCmd synth;
  SimilarityCmd similarity;
  EvalCmd eval;
  TraceCheckCmd trace_check;
  auto* c_cluster = app.add_subcommand("cluster", "peel dominant sets off a similarity matrix");
  auto* c_multi = app.add_subcommand("multistart", "parallel multi-start clustering");
  auto* c_synth = app.add_subcommand("synth", "generate a synthetic dataset");
  auto* c_sim = app.add_subcommand("similarity", "build a similarity matrix from features");
  auto* c_eval = app.add_subcommand("eval", "score labels against ground truth");
  auto* c_trace = app.add_subcommand("trace-check", "check a solver trace against its bounds");
  cluster.add(c_cluster);
  multistart.add(c_multi);
  synth.add(c_synth);
  similarity.add(c_sim);
  eval.add(c_eval);
  trace_check.add(c_trace);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*c_cluster) return cluster.run();
    if (*c_multi) return multistart.run();
    if (*c_synth) return synth.run();
    if (*c_sim) return similarity.run();
    if (*c_eval) return eval.run();
    if (*c_trace) return trace_check.run();
  } catch (const Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "IoError"}, {"message", e.what()}}.dump() << '\n';
    return kData;
  }
  return kUsage;
}
