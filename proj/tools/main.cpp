// entropylab: command-line front end for the entropy, flow, conjugate-heat,
// Harnack, collapse and log-Sobolev computations.
#include "verify.hpp"

#include "entropylab/bounds.hpp"
#include "entropylab/collapse.hpp"
#include "entropylab/conjugate_heat.hpp"
#include "entropylab/errors.hpp"
#include "entropylab/flow.hpp"
#include "entropylab/functional.hpp"
#include "entropylab/harnack.hpp"
#include "entropylab/io.hpp"
#include "entropylab/mesh.hpp"
#include "entropylab/minimizer.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/base_sink.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <iostream>
#include <mutex>
#include <random>

namespace fs = std::filesystem;
using namespace elab;

namespace {

// Collects warnings for the run manifest while still printing them.
class WarningSink : public spdlog::sinks::base_sink<std::mutex> {
 public:
  std::vector<std::string> messages;

 protected:
  void sink_it_(const spdlog::details::log_msg& msg) override {
    if (msg.level >= spdlog::level::warn) messages.emplace_back(msg.payload.data(), msg.payload.size());
  }
  void flush_() override {}
};

struct Common {
  std::string out = "out";
  bool quiet = false;
};

struct Run {
  RunManifest manifest;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  fs::path dir;

  void config(const std::string& k, const std::string& v) { manifest.config.emplace_back(k, v); }
  void config(const std::string& k, double v) { manifest.config.emplace_back(k, fmt17(v)); }
  void input(const std::string& name, const std::string& spec) {
    const std::string bytes = fs::exists(spec) ? read_file(spec) : spec;
    manifest.input_hashes[name] = hex64(fnv1a(bytes));
  }
  void write(const std::string& name, const std::string& content) {
    atomic_write(dir / name, content);
    manifest.outputs.push_back(name);
  }
  void finish(const WarningSink& sink) {
    manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest.warnings.insert(manifest.warnings.end(), sink.messages.begin(), sink.messages.end());
    atomic_write(dir / "manifest.json", manifest_json(manifest));
  }
};

Field read_values(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<double> v;
  double x = 0.0;
  while (in >> x) v.push_back(x);
  if (!in.eof()) throw ValidationError("non-numeric entry in " + path);
  return Eigen::Map<Field>(v.data(), static_cast<Eigen::Index>(v.size()));
}

BetaKind beta_kind(const std::string& s) {
  if (s == "zero") return BetaKind::kZero;
  if (s == "mean_curvature") return BetaKind::kMeanCurvature;
  if (s == "radial") return BetaKind::kRadial;
  if (s == "file") return BetaKind::kFile;
  throw ValidationError("unknown beta '" + s + "'");
}

Field mesh_beta(const TriMesh& mesh, BetaKind kind, double tau, const std::string& file) {
  switch (kind) {
    case BetaKind::kZero:
      return Field::Zero(mesh.n_boundary);
    case BetaKind::kMeanCurvature:
      return curvature_beta(mesh);
    case BetaKind::kRadial:
      return radial_beta(mesh, tau);
    case BetaKind::kFile: {
      const Field v = read_values(file);
      if (v.size() != mesh.n_boundary)
        throw ValidationError("beta file has " + std::to_string(v.size()) + " values, the boundary has " +
                              std::to_string(mesh.n_boundary) + " nodes; use h at least the segment length");
      return v;
    }
  }
  return Field::Zero(mesh.n_boundary);
}

Point3 parse_point(const std::string& s) {
  Point3 p{0.0, 0.0, 0.0};
  std::stringstream in(s);
  std::string part;
  int k = 0;
  while (std::getline(in, part, ',')) {
    if (k == 3) throw ValidationError("a centre has at most three coordinates");
    try {
      p[k++] = std::stod(part);
    } catch (const std::exception&) {
      throw ValidationError("cannot parse centre '" + s + "'");
    }
  }
  return p;
}

// ------------------------------------------------------------------ entropy

// Boundary for meshing at size h. vertices = 0 spaces a shorthand curve at
// about h; curves read from a file are used as given.
Curve meshing_curve(const std::string& domain, int vertices, double h) {
  if (vertices < 0) throw ValidationError("--vertices must be non-negative");
  const CollapseDomain d = parse_domain(domain, vertices > 0 ? vertices : 1024);
  if (vertices > 0 || fs::exists(domain)) return domain_curve(d, vertices > 0 ? vertices : 1024);
  const Curve c = domain_curve(d, 1024);
  return resample_uniform(c, std::max(16, static_cast<int>(std::ceil(c.length() / h))));
}

struct EntropyArgs {
  std::string domain;
  double tau = 0.5;
  std::string beta = "zero";
  std::string beta_file;
  double h = 0.05;
  int vertices = 0;
  bool dump_mesh = false;
  int max_iter = 20000;
  double tol = 1e-9;
};

int cmd_entropy(const EntropyArgs& a, Run& run, bool quiet) {
  if (!(a.tau > 0.0)) throw ValidationError("--tau must be positive");
  if (!(a.h > 0.0)) throw ValidationError("--h must be positive");
  const Curve c = meshing_curve(a.domain, a.vertices, a.h);
  const TriMesh mesh = triangulate(c, a.h);
  const FemOperators ops = assemble(mesh);
  const Field beta = mesh_beta(mesh, beta_kind(a.beta), a.tau, a.beta_file);
  MinimizerOptions mo;
  mo.max_iter = a.max_iter;
  mo.tol = a.tol;
  const MinimizerResult m = minimize(mesh, ops, a.tau, beta, mo);
  const ElReport el = verify_euler_lagrange(m, mesh, ops, a.tau, beta);
  const EntropyReport e = w_beta(mesh, ops, m.f_min, a.tau, beta);
  const std::string json = minimizer_json(m, a.tau, &el);
  run.write("minimizer.json", json);
  run.write("entropy.json", entropy_json(e, a.tau));
  run.write("entropy.csv", "tag,tau,W_beta,ibp_gap,normalization\nminimizer," + fmt17(a.tau) + "," + fmt17(e.W_beta) +
                               "," + fmt17(e.ibp_gap) + "," + fmt17(e.normalization) + "\n");
  if (a.dump_mesh) run.write("mesh.json", mesh_json(mesh));
  if (!quiet) std::cout << json;
  if (!m.converged) throw NumericalError("minimizer", "did not converge", -1, "raise --max-iter or coarsen --h");
  return 0;
}

// --------------------------------------------------------------------- flow

struct FlowArgs {
  std::string domain;
  double frac = 0.8;
  int snapshots = 41;
  double dt_scale = 1.0;
  double a = std::nan("");
  int vertices = 256;
};

FlowTrajectory flow_from(const FlowArgs& a) {
  FlowOptions fo;
  fo.dt_scale = a.dt_scale;
  fo.a = a.a;
  return run_flow(domain_curve(parse_domain(a.domain, a.vertices), a.vertices), a.frac, a.snapshots, fo);
}

int cmd_flow(const FlowArgs& a, Run& run, bool quiet) {
  const FlowTrajectory tr = flow_from(a);
  run.write("trajectory.jsonl", trajectory_jsonl(tr));
  std::string csv = "t,tau,area,length\n";
  for (const auto& s : tr.snapshots)
    csv += fmt17(s.t) + "," + fmt17(s.tau) + "," + fmt17(s.area) + "," + fmt17(s.length) + "\n";
  run.write("flow.csv", csv);
  if (!quiet)
    std::cout << "snapshots " << tr.size() << ", steps " << tr.steps << ", T_est " << fmt17(tr.T_est)
              << (tr.truncated ? ", truncated: " + tr.note : std::string()) << "\n";
  return 0;
}

// ---------------------------------------------------------------- conjugate

struct ConjugateArgs {
  std::string trajectory;
  int t0_index = -1;
  double h = 0.05;
  int substeps = 1;
  bool dump_fields = false;
};

BackwardSolveState conjugate_from(const FlowTrajectory& tr, int t0_index, double h, int substeps) {
  const int k0 = t0_index < 0 ? tr.size() - 1 : t0_index;
  const EndData end = end_data(tr, k0, reference_h(tr, k0, h));
  BackwardOptions bo;
  bo.substeps = substeps;
  return backward_solve(tr, end, bo);
}

void write_state_outputs(const BackwardSolveState& st, Run& run, bool dump_fields) {
  run.write("conservation.csv", conservation_csv(st));
  if (!dump_fields) return;
  std::string s = "snapshot,node,x,y,u,f\n";
  for (int k = 0; k < st.size(); ++k) {
    const Field f = f_from_state(st, k);
    for (int i = 0; i < f.size(); ++i)
      s += std::to_string(k) + "," + std::to_string(i) + "," + fmt17(st.nodes[k][i].x()) + "," +
           fmt17(st.nodes[k][i].y()) + "," + fmt17(st.u[k][i]) + "," + fmt17(f[i]) + "\n";
  }
  run.write("fields.csv", s);
}

int cmd_conjugate(const ConjugateArgs& a, Run& run, bool quiet) {
  const FlowTrajectory tr = parse_trajectory_jsonl(read_file(a.trajectory));
  const BackwardSolveState st = conjugate_from(tr, a.t0_index, a.h, a.substeps);
  write_state_outputs(st, run, a.dump_fields);
  save_state(run.dir / "state.bin", st);
  run.manifest.outputs.push_back("state.bin");
  if (!quiet)
    std::cout << "snapshots " << st.size() << ", max drift " << fmt17(st.max_drift) << ", mu(t0) " << fmt17(st.mu_end)
              << "\n";
  if (st.drift_flagged) run.manifest.warnings.push_back("mass drift beyond budget");
  return 0;
}

// ------------------------------------------------------------------ harnack

struct HarnackArgs {
  std::string domain;
  std::string trajectory;
  FlowArgs flow;
  double h = 0.064;
  int substeps = 1;
  double window = -1.0;
  int stride = 1;
  std::string tangential;  // optional V file per boundary node
};

int cmd_harnack(HarnackArgs a, Run& run, bool quiet) {
  // the cache key covers every input of the backward solve
  std::string key = "harnack-state v1 h=" + fmt17(a.h) + " substeps=" + std::to_string(a.substeps);
  if (!a.trajectory.empty()) {
    key += " trajectory=" + hex64(fnv1a(read_file(a.trajectory)));
  } else {
    if (a.domain.empty()) throw ValidationError("harnack needs --domain or --trajectory");
    a.flow.domain = a.domain;
    const std::string dom = fs::exists(a.domain) ? hex64(fnv1a(read_file(a.domain))) : a.domain;
    key += " domain=" + dom + " frac=" + fmt17(a.flow.frac) + " snapshots=" + std::to_string(a.flow.snapshots) +
           " dt_scale=" + fmt17(a.flow.dt_scale) + " a=" + fmt17(a.flow.a) + " vertices=" + std::to_string(a.flow.vertices);
  }
  const std::string hash = hex64(fnv1a(key));
  run.manifest.input_hashes["backward_solve"] = hash;
  const fs::path cache = run.dir / "cache" / ("state-" + hash + ".bin");
  BackwardSolveState st;
  if (fs::exists(cache)) {
    st = load_state(cache);
    spdlog::info("reusing cached backward solve {}", cache.string());
  } else {
    const FlowTrajectory tr =
        a.trajectory.empty() ? flow_from(a.flow) : parse_trajectory_jsonl(read_file(a.trajectory));
    st = conjugate_from(tr, -1, a.h, a.substeps);
    save_state(cache, st);
  }
  HarnackOptions ho;
  ho.compat_window = a.window;
  ho.stride = a.stride;
  const HarnackReport rep = rate_identity_check(st, ho);
  run.write("harnack.csv", harnack_csv(rep));
  run.write("harnack.dat", harnack_columns(rep));
  write_state_outputs(st, run, false);
  if (!a.tangential.empty()) {
    const Field V = read_values(a.tangential);
    std::string s = "index,t,value\n";
    for (const auto& r : rep.records) {
      const HarnackTerm h = boundary_term_harnack(st, r.index, &V);
      s += std::to_string(r.index) + "," + fmt17(r.t) + "," + fmt17(h.value) + "\n";
    }
    run.write("harnack_tangential.csv", s);
  }
  if (!quiet)
    std::cout << "records " << rep.records.size() << ", window " << fmt17(rep.window) << ", max gap_a "
              << fmt17(rep.max_gap_a) << ", max gap_gradw " << fmt17(rep.max_gap_gradw)
              << ", conjecture value non-negative: " << (rep.conjecture_nonnegative ? "yes" : "no") << "\n";
  return 0;
}

// ----------------------------------------------------------------- collapse

struct CollapseArgs {
  std::string domain;
  std::string beta = "zero";
  std::string beta_file;
  double tau = 1.0;
  std::string radii = "geometric:4,512";
  std::string centers = "0,0,0";
  long budget = 1000000;
  std::uint64_t seed = 1;
  double c1_bound = 64.0;
  int vertices = 1024;
};

int cmd_collapse(const CollapseArgs& a, Run& run, bool quiet) {
  const CollapseDomain dom = parse_domain(a.domain, a.vertices);
  const std::vector<double> radii = parse_radii(a.radii);
  BetaSpec beta{beta_kind(a.beta), a.tau, {}};
  if (beta.kind == BetaKind::kFile) beta.vertex_values = read_values(a.beta_file);
  ScanOptions so;
  so.budget = a.budget;
  so.seed = a.seed;
  so.c1_bound = a.c1_bound;
  std::vector<Point3> centers;
  if (a.centers.rfind("schedule:", 0) == 0) {
    so.center_schedule = a.centers.substr(9);
    if (so.center_schedule != "grim_reaper") throw ValidationError("unknown centre schedule '" + so.center_schedule + "'");
    centers = grim_reaper_schedule(radii, dimension(dom));
  } else {
    std::stringstream in(a.centers);
    std::string p;
    while (std::getline(in, p, ';')) centers.push_back(parse_point(p));
  }
  const RatioScan s = ratio_scan(dom, centers, radii, beta, so);
  run.write("scan.csv", scan_csv(s));
  run.write("scan.dat", scan_columns(s));
  if (!quiet) {
    std::cout << scan_csv(s);
    std::cout << "# ratio monotone: " << (s.ratio_monotone ? "yes" : "no")
              << ", ratio to zero: " << (s.ratio_to_zero ? "yes" : "no")
              << ", c1 bounded: " << (s.c1_bounded ? "yes" : "no")
              << ", collapsed trend: " << (s.collapsed_trend ? "yes" : "no") << "\n";
  }
  return 0;
}

// --------------------------------------------------------------- logsobolev

struct LogSobolevArgs {
  std::string domain = "disk:1";
  double h = 0.05;
  int vertices = 0;
  std::vector<double> eps{0.1, 1.0, 10.0};
  int trials = 100;
  std::uint64_t seed = 7;
};

int cmd_logsobolev(const LogSobolevArgs& a, Run& run, bool quiet) {
  if (!(a.h > 0.0)) throw ValidationError("--h must be positive");
  const Curve c = meshing_curve(a.domain, a.vertices, a.h);
  const TriMesh mesh = triangulate(c, a.h);
  const FemOperators ops = assemble(mesh);
  const SobolevConstants k = log_sobolev_constants(mesh, ops, a.seed);
  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::string csv = "trial,eps,lhs,rhs,holds\n";
  int violations = 0;
  for (int t = 0; t < a.trials; ++t) {
    Field phi(mesh.size());
    for (int i = 0; i < phi.size(); ++i) phi[i] = U(rng);
    phi /= std::sqrt(phi.dot(ops.M * phi));
    for (double e : a.eps) {
      const LogSobolevCheck r = log_sobolev_check(mesh, ops, phi, e, k.c_S);
      violations += r.holds ? 0 : 1;
      csv += std::to_string(t) + "," + fmt17(e) + "," + fmt17(r.lhs) + "," + fmt17(r.rhs) + "," +
             (r.holds ? "1" : "0") + "\n";
    }
  }
  run.write("logsobolev.csv", csv);
  if (!quiet)
    std::cout << "c_S " << fmt17(k.c_S) << " (" << k.c_S_witness << "), c_trace " << fmt17(k.c_trace)
              << ", violations " << violations << "\n";
  if (violations > 0) run.manifest.warnings.push_back(std::to_string(violations) + " log-Sobolev violations");
  return 0;
}

// ------------------------------------------------------------------- verify

int cmd_verify(const std::string& suite, const std::vector<int>& criteria, const std::string& cache_dir) {
  verify::SuiteOptions o;
  o.cache_dir = cache_dir;
  const std::vector<int> ids = criteria.empty() ? verify::suite_criteria(suite) : criteria;
  bool ok = true;
  for (int id : ids) {
    const auto r = verify::run_criterion(id, o);
    std::cout << verify::summary_line(r) << "\n";
    for (const auto& l : verify::detail_lines(r)) std::cout << l << "\n";
    std::cout.flush();
    ok = ok && r.pass();
  }
  return ok ? 0 : static_cast<int>(ExitCode::kAcceptance);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entropylab: boundary entropy, curve-shortening flow and conjugate heat experiments"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  app.set_version_flag("--version", ENTROPYLAB_VERSION);
  Common common;
  std::string log_level = "warn";
  app.add_option("--out", common.out, "output directory")->capture_default_str();
  app.add_flag("-q,--quiet", common.quiet, "suppress the summary on stdout");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error")->capture_default_str();

  EntropyArgs ea;
  auto* entropy = app.add_subcommand("entropy", "minimise the entropy functional on a planar domain");
  entropy->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
  entropy->add_option("--domain", ea.domain, "domain shorthand or JSON file")->required();
  entropy->add_option("--tau", ea.tau)->capture_default_str();
  entropy->add_option("--beta", ea.beta)->check(CLI::IsMember({"zero", "mean_curvature", "radial", "file"}))->capture_default_str();
  entropy->add_option("--beta-file", ea.beta_file, "one value per boundary node")->check(CLI::ExistingFile);
  entropy->add_option("--h", ea.h, "mesh size")->capture_default_str();
  entropy->add_option("--vertices", ea.vertices, "vertices for shorthand curves; 0 spaces them at about h")->capture_default_str();
  entropy->add_option("--max-iter", ea.max_iter)->capture_default_str();
  entropy->add_option("--tol", ea.tol)->capture_default_str();
  entropy->add_flag("--dump-mesh", ea.dump_mesh);

  FlowArgs fa;
  auto* flow = app.add_subcommand("flow", "curve-shortening flow");
  flow->add_option("--domain", fa.domain)->required();
  flow->add_option("--frac", fa.frac, "t1 as a fraction of A0/2pi")->capture_default_str();
  flow->add_option("--snapshots", fa.snapshots, "uniform snapshots; 0 records every step")->capture_default_str();
  flow->add_option("--dt-scale", fa.dt_scale)->capture_default_str();
  flow->add_option("--a", fa.a, "tau = a - t (default: A0/2pi)");
  flow->add_option("--vertices", fa.vertices)->capture_default_str();

  ConjugateArgs ca;
  auto* conj = app.add_subcommand("conjugate", "backward conjugate heat solve on a trajectory");
  conj->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
  conj->add_option("--trajectory", ca.trajectory, "JSON-lines trajectory")->required()->check(CLI::ExistingFile);
  conj->add_option("--t0-index", ca.t0_index, "end-data snapshot (default: last)");
  conj->add_option("--h", ca.h, "mesh size on the t = 0 domain")->capture_default_str();
  conj->add_option("--substeps", ca.substeps)->capture_default_str();
  conj->add_flag("--dump-fields", ca.dump_fields);

  HarnackArgs ha;
  auto* harnack = app.add_subcommand("harnack", "rate identity and Harnack boundary terms along a flow");
  harnack->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
  harnack->add_option("--domain", ha.domain, "initial curve; runs flow, minimiser and backward solve");
  harnack->add_option("--trajectory", ha.trajectory, "use an existing trajectory")->check(CLI::ExistingFile);
  harnack->add_option("--frac", ha.flow.frac)->capture_default_str();
  harnack->add_option("--snapshots", ha.flow.snapshots)->capture_default_str();
  harnack->add_option("--dt-scale", ha.flow.dt_scale)->capture_default_str();
  harnack->add_option("--vertices", ha.flow.vertices)->capture_default_str();
  harnack->add_option("--h", ha.h)->capture_default_str();
  harnack->add_option("--substeps", ha.substeps)->capture_default_str();
  harnack->add_option("--window", ha.window, "compatibility window in t (default: five snapshot spacings)");
  harnack->add_option("--stride", ha.stride)->capture_default_str();
  harnack->add_option("--tangential", ha.tangential, "tangential field V per boundary node")->check(CLI::ExistingFile);

  CollapseArgs la;
  auto* collapse = app.add_subcommand("collapse", "volume-ratio scan over balls");
  collapse->add_option("--domain", la.domain)->required();
  collapse->add_option("--beta", la.beta)->check(CLI::IsMember({"zero", "mean_curvature", "radial", "file"}))->capture_default_str();
  collapse->add_option("--beta-file", la.beta_file)->check(CLI::ExistingFile);
  collapse->add_option("--tau", la.tau, "tau for radial beta")->capture_default_str();
  collapse->add_option("--radii", la.radii, "geometric:r0,r1[,q] or a list")->capture_default_str();
  collapse->add_option("--centers", la.centers, "x,y[,z] (';' separated, one per radius) or schedule:grim_reaper")
      ->capture_default_str();
  collapse->add_option("--budget", la.budget, "samples per 3D volume")->capture_default_str();
  collapse->add_option("--seed", la.seed)->capture_default_str();
  collapse->add_option("--c1-bound", la.c1_bound)->capture_default_str();
  collapse->add_option("--vertices", la.vertices)->capture_default_str();

  LogSobolevArgs sa;
  auto* logsob = app.add_subcommand("logsobolev", "log-Sobolev inequality on random fields");
  logsob->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
  logsob->add_option("--domain", sa.domain)->capture_default_str();
  logsob->add_option("--h", sa.h)->capture_default_str();
  logsob->add_option("--eps", sa.eps, "comma-separated")->delimiter(',')->capture_default_str();
  logsob->add_option("--trials", sa.trials)->capture_default_str();
  logsob->add_option("--seed", sa.seed)->capture_default_str();

  std::string suite = "all";
  std::vector<int> criteria;
  std::string cache_dir;
  auto* ver = app.add_subcommand("verify", "run acceptance criteria");
  ver->add_option("--suite", suite)
      ->check(CLI::IsMember({"all", "shrinker", "rate", "entropy", "collapse", "identity", "logsobolev", "flow"}))
      ->capture_default_str();
  ver->add_option("--criterion", criteria)->check(CLI::Range(1, verify::kCriteria));
  ver->add_option("--cache-dir", cache_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kValidation);
  }

  auto sink = std::make_shared<WarningSink>();
  spdlog::default_logger()->sinks().push_back(sink);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (ver->parsed()) return cmd_verify(suite, criteria, cache_dir);

    Run run;
    run.dir = common.out;
    run.manifest.version = ENTROPYLAB_VERSION;
    fs::create_directories(run.dir);
    int rc = 0;
    if (entropy->parsed()) {
      run.manifest.command = "entropy";
      run.config("domain", ea.domain);
      run.config("tau", ea.tau);
      run.config("beta", ea.beta);
      run.config("h", ea.h);
      run.config("vertices", std::to_string(ea.vertices));
      run.input("domain", ea.domain);
      if (!ea.beta_file.empty()) run.input("beta_file", ea.beta_file);
      rc = cmd_entropy(ea, run, common.quiet);
    } else if (flow->parsed()) {
      run.manifest.command = "flow";
      run.config("domain", fa.domain);
      run.config("frac", fa.frac);
      run.config("snapshots", std::to_string(fa.snapshots));
      run.config("dt_scale", fa.dt_scale);
      run.config("a", fa.a);
      run.input("domain", fa.domain);
      rc = cmd_flow(fa, run, common.quiet);
    } else if (conj->parsed()) {
      run.manifest.command = "conjugate";
      run.config("trajectory", ca.trajectory);
      run.config("t0_index", std::to_string(ca.t0_index));
      run.config("h", ca.h);
      run.config("substeps", std::to_string(ca.substeps));
      run.input("trajectory", ca.trajectory);
      rc = cmd_conjugate(ca, run, common.quiet);
    } else if (harnack->parsed()) {
      run.manifest.command = "harnack";
      run.config("domain", ha.domain);
      run.config("trajectory", ha.trajectory);
      run.config("frac", ha.flow.frac);
      run.config("snapshots", std::to_string(ha.flow.snapshots));
      run.config("h", ha.h);
      run.config("window", ha.window);
      run.config("stride", std::to_string(ha.stride));
      if (!ha.trajectory.empty()) run.input("trajectory", ha.trajectory);
      if (!ha.domain.empty()) run.input("domain", ha.domain);
      rc = cmd_harnack(ha, run, common.quiet);
    } else if (collapse->parsed()) {
      run.manifest.command = "collapse";
      run.config("domain", la.domain);
      run.config("beta", la.beta);
      run.config("radii", la.radii);
      run.config("centers", la.centers);
      run.config("budget", std::to_string(la.budget));
      run.config("seed", std::to_string(la.seed));
      run.config("c1_bound", la.c1_bound);
      run.input("domain", la.domain);
      rc = cmd_collapse(la, run, common.quiet);
    } else if (logsob->parsed()) {
      run.manifest.command = "logsobolev";
      run.config("domain", sa.domain);
      run.config("h", sa.h);
      run.config("trials", std::to_string(sa.trials));
      run.config("seed", std::to_string(sa.seed));
      run.input("domain", sa.domain);
      rc = cmd_logsobolev(sa, run, common.quiet);
    }
    run.finish(*sink);
    return rc;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kValidation);
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kNumerical);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kNumerical);
  }
}
