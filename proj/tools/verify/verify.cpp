#include "verify.hpp"

#include "entropylab/bounds.hpp"
#include "entropylab/collapse.hpp"
#include "entropylab/constants.hpp"
#include "entropylab/errors.hpp"
#include "entropylab/evolution_identity.hpp"
#include "entropylab/flow.hpp"
#include "entropylab/functional.hpp"
#include "entropylab/harnack.hpp"
#include "entropylab/io.hpp"
#include "entropylab/mesh.hpp"
#include "entropylab/minimizer.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

namespace elab::verify {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

template <class F>
double quad(F f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

BackwardSolveState cached(const SuiteOptions& o, const std::string& key,
                          const std::function<BackwardSolveState()>& make) {
  if (o.cache_dir.empty()) return make();
  const auto path = o.cache_dir / ("state-" + hex64(fnv1a(key)) + ".bin");
  if (std::filesystem::exists(path)) {
    try {
      return load_state(path);
    } catch (const std::exception& e) {
      spdlog::warn("ignoring unreadable cache {}: {}", path.string(), e.what());
    }
  }
  BackwardSolveState st = make();
  save_state(path, st);
  return st;
}

// Mesh whose boundary vertices are spaced about h apart.
struct Problem {
  TriMesh mesh;
  FemOperators ops;
  Curve boundary;
  double tau = 0.0;
  Field beta;
  double h = 0.0;
};

Problem make_problem(const Curve& c, double h, double tau, BetaKind kind) {
  Problem p;
  p.mesh = triangulate(c, h);
  p.ops = assemble(p.mesh);
  p.boundary = p.mesh.boundary_curve();
  p.tau = tau;
  p.h = h;
  switch (kind) {
    case BetaKind::kRadial:
      p.beta = radial_beta(p.mesh, tau);
      break;
    case BetaKind::kMeanCurvature:
      p.beta = curvature_beta(p.mesh);
      break;
    default:
      p.beta = Field::Zero(p.mesh.n_boundary);
  }
  return p;
}

int vertices_for(double length, double h) { return std::max(1, static_cast<int>(std::ceil(length / h - 1e-9))); }

Curve polygon_h(const std::vector<Vec2>& corners, double h) {
  std::vector<Vec2> v;
  for (size_t i = 0; i < corners.size(); ++i) {
    const Vec2& a = corners[i];
    const Vec2& b = corners[(i + 1) % corners.size()];
    const int n = vertices_for((b - a).norm(), h);
    for (int k = 0; k < n; ++k) v.push_back(a + (b - a) * (static_cast<double>(k) / n));
  }
  return Curve(v);
}

Curve circle_h(double R, double h) { return Curve::circle(R, std::max(16, vertices_for(2.0 * kPi * R, h))); }

Curve ellipse_h(double a, double b, double h) {
  const double L = kPi * (3.0 * (a + b) - std::sqrt((3.0 * a + b) * (a + 3.0 * b)));
  return Curve::ellipse(a, b, std::max(16, vertices_for(L, h)));
}

// W_β of f = r²/4τ - log c on the disk of radius R with β = x·ν/2τ, from the
// definition by one-dimensional quadrature.
double disk_radial_oracle(double R, double tau) {
  const double Z = quad([&](double r) { return std::exp(-r * r / (4.0 * tau)) / (4.0 * kPi * tau) * 2.0 * kPi * r; },
                        0.0, R);
  const double c = 1.0 / Z;
  auto u = [&](double r) { return c * std::exp(-r * r / (4.0 * tau)) / (4.0 * kPi * tau); };
  auto f = [&](double r) { return r * r / (4.0 * tau) - std::log(c); };
  const double vol = quad(
      [&](double r) {
        const double g = r / (2.0 * tau);
        return (tau * g * g + f(r) - 2.0) * u(r) * 2.0 * kPi * r;
      },
      0.0, R);
  const double beta = R / (2.0 * tau);
  return vol + 2.0 * tau * beta * u(R) * 2.0 * kPi * R;
}

// ---------------------------------------------------------------- criterion 1

CriterionResult criterion_1(const SuiteOptions& o) {
  CriterionResult r;
  r.title = "shrinker equality battery";
  const auto t0 = Clock::now();
  const BackwardSolveState st = shrinker_state(o);
  HarnackOptions ho;
  ho.stride = 10;
  const HarnackReport rep = rate_identity_check(st, ho);

  double wdev = 0.0;
  for (double w : rep.W_all) wdev = std::max(wdev, std::abs(w - rep.W_all.front()));
  double bh = 0.0, vol = 0.0, direct = 0.0, dw = 0.0;
  int retained = 0;
  for (const auto& rec : rep.records) {
    if (!rec.retained) continue;
    ++retained;
    bh = std::max(bh, std::abs(rec.boundary_term_harnack));
    vol = std::max(vol, std::abs(rec.volume_term));
    direct = std::max(direct, std::abs(rec.boundary_term_direct));
    dw = std::max(dw, std::abs(rec.dW_dt_fd));
  }
  double fmatch = 0.0;
  for (int k = 0; k < st.size(); k += 10) {
    const TriMesh mesh = st.mesh(k);
    const FemOperators ops = assemble(mesh);
    const double tau = st.trajectory[k].tau;
    const Field f = f_from_state(st, k);
    const Field& u = st.u[k];
    Field diff(f.size());
    for (int i = 0; i < f.size(); ++i) diff[i] = f[i] - mesh.nodes[i].squaredNorm() / (4.0 * tau);
    const Field w = ops.m.cwiseProduct(u);
    const double c = w.dot(diff) / w.sum();
    fmatch = std::max(fmatch, std::sqrt(w.dot((diff.array() - c).square().matrix()) / w.sum()));
  }
  r.seconds = seconds_since(t0);
  r.checks.push_back(at_most("max |W_beta(t) - W_beta(0)|", wdev, 5e-3));
  r.checks.push_back(at_most("max |boundary_term_harnack|", bh, 5e-3));
  r.checks.push_back(at_most("max |volume_term|", vol, 5e-3));
  r.checks.push_back(at_most("f vs |x|^2/4tau + const (u-weighted L2)", fmatch, 5e-3));
  r.checks.push_back(at_most("runtime [s]", r.seconds, 120.0, "includes cache reads when present"));
  r.notes.push_back("snapshots " + std::to_string(st.size()) + ", mesh nodes " + std::to_string(st.reference.size()) +
                    ", retained records " + std::to_string(retained) + ", window " + num(rep.window));
  r.notes.push_back("max |boundary_term_direct| " + num(direct) + ", max |dW/dt| " + num(dw) + ", mu(t0) " +
                    num(st.mu_end));
  return r;
}

// ---------------------------------------------------------------- criterion 2

struct GapSummary {
  double worst_a = 0.0;      // max gap_a / allowance
  double worst_gradw = 0.0;  // max gap_gradw / allowance
  double max_gap_a = 0.0;
  double max_gap_gradw = 0.0;
  int retained = 0;
  int records = 0;
};

GapSummary summarize_gaps(const HarnackReport& rep) {
  GapSummary g;
  for (const auto& rec : rep.records) {
    ++g.records;
    if (!rec.retained) continue;
    ++g.retained;
    const double allow_a = 0.1 * std::max(std::abs(rec.volume_term) + std::abs(rec.boundary_term_direct), 1e-3);
    const double allow_w =
        0.1 * std::max({std::abs(rec.boundary_term_direct), std::abs(rec.boundary_term_harnack), 1e-3});
    g.worst_a = std::max(g.worst_a, rec.identity_gap_a / allow_a);
    g.worst_gradw = std::max(g.worst_gradw, rec.identity_gap_gradw / allow_w);
  }
  g.max_gap_a = rep.max_gap_a;
  g.max_gap_gradw = rep.max_gap_gradw;
  return g;
}

HarnackReport ellipse_report(const BackwardSolveState& st) {
  HarnackOptions ho;
  ho.compat_window = 0.01;
  ho.stride = std::max(1, st.size() / 40);
  return rate_identity_check(st, ho);
}

CriterionResult criterion_2(const SuiteOptions& o) {
  CriterionResult r;
  r.title = "rate identity on the ellipse flow";
  const auto t0 = Clock::now();
  const BackwardSolveState s0 = ellipse_state(0, o);
  const HarnackReport r0 = ellipse_report(s0);
  const GapSummary g0 = summarize_gaps(r0);
  const BackwardSolveState s1 = ellipse_state(1, o);
  const HarnackReport r1 = ellipse_report(s1);
  const GapSummary g1 = summarize_gaps(r1);
  r.seconds = seconds_since(t0);

  r.checks.push_back(at_most("max gap_a / (10% of max(|vol|+|direct|, 1e-3))", g0.worst_a, 1.0));
  r.checks.push_back(at_most("max gap_gradw / (10% of max(|direct|, |harnack|, 1e-3))", g0.worst_gradw, 1.0));
  r.checks.push_back(at_least("gap_a shrink factor under refinement", g0.max_gap_a / g1.max_gap_a, 2.0));
  r.checks.push_back(at_least("gap_gradw shrink factor under refinement", g0.max_gap_gradw / g1.max_gap_gradw, 2.0));
  r.checks.push_back(at_most("runtime [s]", r.seconds, 300.0, "includes cache reads when present"));
  r.notes.push_back("level 0: snapshots " + std::to_string(s0.size()) + ", nodes " + std::to_string(s0.reference.size()) +
                    ", retained " + std::to_string(g0.retained) + "/" + std::to_string(g0.records) + ", max gap_a " +
                    num(g0.max_gap_a) + ", max gap_gradw " + num(g0.max_gap_gradw));
  r.notes.push_back("level 1: snapshots " + std::to_string(s1.size()) + ", nodes " + std::to_string(s1.reference.size()) +
                    ", retained " + std::to_string(g1.retained) + "/" + std::to_string(g1.records) + ", max gap_a " +
                    num(g1.max_gap_a) + ", max gap_gradw " + num(g1.max_gap_gradw) + ", relative worst " +
                    num(g1.worst_a) + " / " + num(g1.worst_gradw));
  bool all_nonneg = r0.conjecture_nonnegative;
  r.notes.push_back(std::string("conjecture value non-negative at every retained record: ") +
                    (all_nonneg ? "yes" : "no") + "; W_beta non-decreasing: " + (r0.W_nondecreasing ? "yes" : "no"));
  return r;
}

// ---------------------------------------------------------------- criterion 3

CriterionResult criterion_3(const SuiteOptions& o) {
  CriterionResult r;
  r.title = "mass conservation of the backward solves";
  const auto t0 = Clock::now();
  const std::pair<const char*, std::function<BackwardSolveState()>> runs[] = {
      {"shrinker", [&] { return shrinker_state(o); }},
      {"ellipse level 0", [&] { return ellipse_state(0, o); }},
      {"ellipse level 1", [&] { return ellipse_state(1, o); }},
  };
  for (const auto& [name, make] : runs) {
    const BackwardSolveState st = make();
    double drift = 0.0;
    for (double m : st.mass) drift = std::max(drift, std::abs(m - 1.0));
    r.checks.push_back(at_most(std::string(name) + ": max |int u - 1|", drift, 1e-3));
    r.notes.push_back(std::string(name) + ": max per-step drift " + num(st.max_step_drift) + ", clamped steps " +
                      std::to_string(st.clamped_steps));
  }
  r.seconds = seconds_since(t0);
  return r;
}

// ---------------------------------------------------------------- criterion 4

CriterionResult criterion_4(const SuiteOptions&) {
  CriterionResult r;
  r.title = "entropy values";
  const auto t0 = Clock::now();

  {
    const double tau = 0.5, R = std::sqrt(2.0 * tau);
    const Problem p = make_problem(circle_h(R, 0.02), 0.02, tau, BetaKind::kRadial);
    const MinimizerResult m = minimize(p.mesh, p.ops, tau, p.beta);
    const double oracle = disk_radial_oracle(R, tau);
    r.checks.push_back(at_most("disk sqrt(2tau), radial beta: ||mu| - |oracle||", std::abs(std::abs(m.mu) - std::abs(oracle)),
                               5e-3, "mu " + num(m.mu) + ", oracle " + num(oracle)));
    r.checks.push_back(holds("disk sqrt(2tau): sign of mu matches the definitional value", (m.mu < 0) == (oracle < 0),
                             "both negative: W = -log c"));
  }
  {
    // half plane {x2 < 0} truncated to a box; f = |x|²/4τ normalises to f - log 2
    const double tau = 0.5, L = 5.0, h = 0.1;
    const Curve box = polygon_h({{-L, -L}, {L, -L}, {L, 0.0}, {-L, 0.0}}, h);
    const Problem p = make_problem(box, h, tau, BetaKind::kRadial);
    Field f(p.mesh.size());
    for (int i = 0; i < f.size(); ++i) f[i] = p.mesh.nodes[i].squaredNorm() / (4.0 * tau);
    const EntropyReport e = w_beta(p.mesh, p.ops, f, tau, p.beta);
    r.checks.push_back(at_most("half plane a = 0: ||W_beta| - log 2|", std::abs(std::abs(e.W_beta) - std::log(2.0)), 1e-3,
                               "W_beta " + num(e.W_beta)));
    r.checks.push_back(at_most("half plane a = 0: ||log int u| - log 2|",
                               std::abs(std::abs(std::log(e.normalization)) - std::log(2.0)), 1e-3));
  }
  {
    const double tau = 0.5, h = 0.15;
    const Problem p = make_problem(circle_h(6.0, h), h, tau, BetaKind::kZero);
    const MinimizerResult m = minimize(p.mesh, p.ops, tau, p.beta);
    std::string starts;
    for (const auto& s : m.starts) starts += " " + s.label + "=" + num(s.energy);
    r.checks.push_back(within("disk radius 6, beta = 0: mu", m.mu, -0.05, 0.01, "starts:" + starts));
  }
  r.seconds = seconds_since(t0);
  return r;
}

// ---------------------------------------------------------------- criterion 5

struct Case {
  std::string name;
  std::function<Curve(double)> curve;
  double tau;
  BetaKind beta;
};

std::vector<Case> el_cases() {
  return {
      {"disk, radial beta", [](double h) { return circle_h(1.0, h); }, 0.5, BetaKind::kRadial},
      {"ellipse, beta = H", [](double h) { return ellipse_h(1.2, 0.8, h); }, 0.1, BetaKind::kMeanCurvature},
      {"rounded square, beta = 0",
       [](double h) { return Curve::rounded_square(1.0, 0.3, vertices_for(8.0 - 8.0 * 0.3 + 2.0 * kPi * 0.3, h)); },
       0.05, BetaKind::kZero},
  };
}

CriterionResult criterion_5(const SuiteOptions&) {
  CriterionResult r;
  r.title = "Euler-Lagrange characterization";
  const auto t0 = Clock::now();
  for (const Case& c : el_cases()) {
    double bc_prev = 0.0;
    for (double h : {0.04, 0.02}) {
      const Problem p = make_problem(c.curve(h), h, c.tau, c.beta);
      const MinimizerResult m = minimize(p.mesh, p.ops, c.tau, p.beta);
      const ElReport el = verify_euler_lagrange(m, p.mesh, p.ops, c.tau, p.beta);
      const std::string tag = c.name + ", h = " + num(h);
      if (!m.converged) {
        r.notes.push_back(tag + ": not converged, excluded");
        continue;
      }
      r.checks.push_back(at_most(tag + ": W_constancy / (1 + |mu|)", m.W_constancy / (1.0 + std::abs(m.mu)), 1e-2));
      r.checks.push_back(at_most(tag + ": el_residual / h", m.el_residual / h, 1.0));
      if (bc_prev > 0.0)
        r.checks.push_back(at_least(c.name + ": measured order of the boundary-condition residual",
                                    std::log2(bc_prev / el.bc_residual), 0.8,
                                    "residual " + num(bc_prev) + " -> " + num(el.bc_residual)));
      bc_prev = el.bc_residual;
      r.notes.push_back(tag + ": mu " + num(m.mu) + ", multiplier gap " + num(el.multiplier_gap));
    }
  }
  r.seconds = seconds_since(t0);
  return r;
}

// ---------------------------------------------------------------- criterion 6

CriterionResult criterion_6(const SuiteOptions&) {
  CriterionResult r;
  r.title = "lower and upper bound sandwich";
  const auto t0 = Clock::now();
  std::vector<Case> cases = el_cases();
  cases.push_back({"disk, beta = 0, tau = 0.05", [](double h) { return circle_h(1.0, h); }, 0.05, BetaKind::kZero});
  for (const Case& c : cases) {
    const double h = 0.04;
    const Problem p = make_problem(c.curve(h), h, c.tau, c.beta);
    const MinimizerResult m = minimize(p.mesh, p.ops, c.tau, p.beta);
    const SobolevConstants k = log_sobolev_constants(p.mesh, p.ops);
    const double sup_beta = p.beta.size() ? p.beta.cwiseAbs().maxCoeff() : 0.0;
    const LowerBoundChain lb = lower_bound_rhs(c.tau, sup_beta, k);
    const double radius = std::sqrt(c.tau);
    double best = std::numeric_limits<double>::infinity();
    Vec2 best_c = Vec2::Zero();
    const int stride = std::max(1, p.mesh.size() / 400);
    for (int i = 0; i < p.mesh.size(); i += stride) {
      const UpperBound ub = volume_ratio_upper_bound(p.boundary, p.beta, p.mesh.nodes[i], radius);
      if (ub.value < best) {
        best = ub.value;
        best_c = p.mesh.nodes[i];
      }
    }
    r.checks.push_back(within(c.name + ": lower <= mu <= upper", m.mu, lb.total, best,
                              "ball centre (" + num(best_c.x()) + ", " + num(best_c.y()) + "), r = " + num(radius)));
  }
  r.seconds = seconds_since(t0);
  return r;
}

// ---------------------------------------------------------------- criterion 7

CriterionResult criterion_7(const SuiteOptions&) {
  CriterionResult r;
  r.title = "scaling invariance";
  const auto t0 = Clock::now();
  const double lambda = 3.0, tau = 0.5, h = 0.04;
  const Vec2 x0(1.0, -2.0);
  const Curve c = ellipse_h(1.2, 0.8, h);
  std::vector<Vec2> moved;
  for (const auto& v : c.vertices()) moved.push_back((v - x0) / lambda);
  const Curve cs(moved);
  for (BetaKind kind : {BetaKind::kRadial, BetaKind::kMeanCurvature}) {
    const Problem p = make_problem(c, h, tau, kind);
    const MinimizerResult m = minimize(p.mesh, p.ops, tau, p.beta);

    Problem q = make_problem(cs, h / lambda, tau / (lambda * lambda), BetaKind::kZero);
    // β'(y) = λβ(λy + x₀), evaluated pointwise on the scaled boundary
    const auto nu = q.boundary.outward_normals();
    const Field kappa = q.boundary.curvature();
    for (int i = 0; i < q.mesh.n_boundary; ++i) {
      const Vec2 x = lambda * q.mesh.nodes[i] + x0;
      q.beta[i] = kind == BetaKind::kRadial ? lambda * x.dot(nu[i]) / (2.0 * tau) : kappa[i];
    }
    const MinimizerResult ms = minimize(q.mesh, q.ops, q.tau, q.beta);
    const std::string name = kind == BetaKind::kRadial ? "radial beta" : "beta = H";
    r.checks.push_back(at_most(name + ": |mu(scaled) - mu|", std::abs(ms.mu - m.mu), 1e-3,
                               "mu " + num(m.mu) + ", scaled " + num(ms.mu)));
  }
  r.seconds = seconds_since(t0);
  return r;
}

// ---------------------------------------------------------------- criterion 8

CriterionResult criterion_8(const SuiteOptions&) {
  CriterionResult r;
  r.title = "collapse scans";
  const auto t0 = Clock::now();
  const BetaSpec zero{BetaKind::kZero, 1.0, {}};
  const BetaSpec mean{BetaKind::kMeanCurvature, 1.0, {}};
  {
    const auto radii = geometric_radii(4.0, 512.0);
    const RatioScan s = ratio_scan(AnalyticDomain{Slab{1.0, 2}}, {Point3{0, 0, 0}}, radii, zero);
    std::vector<double> ratio;
    for (const auto& row : s.rows) ratio.push_back(row.ratio);
    const FitResult fit = fit_inverse_r(radii, ratio);
    r.checks.push_back(at_least("slab d = 1: R^2 of ratio ~ C/r", fit.r_squared, 0.99, "C = " + num(fit.C)));
  }
  {
    const auto radii = geometric_radii(4.0, 64.0);
    ScanOptions so;
    so.budget = 1000000;
    const RatioScan s = ratio_scan(AnalyticDomain{Catenoid3D{}}, {Point3{0, 0, 0}}, radii, zero, so);
    std::vector<double> vol;
    double rel = 0.0;
    for (const auto& row : s.rows) {
      vol.push_back(row.V_full);
      rel = std::max(rel, row.mc_error / row.V_full);
    }
    const FitResult fit = fit_r2_log(radii, vol);
    r.checks.push_back(at_least("catenoid: R^2 of V ~ C r^2 log(1+r)", fit.r_squared, 0.98,
                                "C = " + num(fit.C) + ", max relative sampling error " + num(rel)));
  }
  {
    const auto radii = geometric_radii(4.0, 256.0);
    ScanOptions so;
    so.center_schedule = "grim_reaper";
    const RatioScan s = ratio_scan(AnalyticDomain{GrimReaperProduct{1}}, grim_reaper_schedule(radii, 2), radii, mean, so);
    double hmax = 0.0;
    for (const auto& row : s.rows) hmax = std::max(hmax, row.h_term);
    r.checks.push_back(holds("grim reaper: ratio monotone", s.ratio_monotone));
    r.checks.push_back(at_most("grim reaper: ratio at r = 256", s.rows.back().ratio, 0.05));
    r.checks.push_back(holds("grim reaper: c1 bounded by " + num(s.c1_bound), s.c1_bounded));
    r.checks.push_back(at_most("grim reaper: max H-term", hmax, 1.0));
  }
  for (int n : {1, 2, 3}) {
    const double s = -0.25;
    const double rr = 8.0;
    const SphereRatio q = shrinking_sphere_ratio(n, s, rr, 0.0, true);
    const SphereRatio cf = shrinking_sphere_ratio(n, s, rr);
    const double target = 0.5 * (n + 1);
    r.checks.push_back(at_most("sphere n = " + std::to_string(n) + ": |c_n(quadrature) / ((n+1)/2) - 1|",
                               std::abs(q.c_n / target - 1.0), 1e-2,
                               "closed form c_n " + num(cf.c_n) + ", quadrature " + num(q.c_n)));
  }
  r.seconds = seconds_since(t0);
  return r;
}

// ---------------------------------------------------------------- criterion 9

CriterionResult criterion_9(const SuiteOptions&) {
  CriterionResult r;
  r.title = "evolution identity on exact solutions";
  const auto t0 = Clock::now();
  {
    GaussianSum g{{Vec2(-1.0, 0.0), Vec2(1.0, 0.0)}, {0.5, 0.5}, 1.0};
    const ConvergenceStudy cs = identity_convergence(g, {0.2, 0.1, 0.05});
    std::string res;
    for (double v : cs.residual) res += " " + num(v);
    r.checks.push_back(at_least("two Gaussians: measured order", cs.order, 1.8, "residuals" + res));
  }
  {
    GaussianSum g{{Vec2(0.3, -0.2)}, {1.0}, 1.0};
    IdentityGrid grid;
    grid.dx = 0.1;
    grid.window = 1.0;
    const IdentityResidual res = identity_residual(g, grid);
    r.checks.push_back(at_most("single Gaussian: identity residual", res.w_identity, 1e-10,
                               "max |W| " + num(res.max_abs_W)));
  }
  {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    std::vector<Vec2> pts;
    for (int i = 0; i < 200; ++i) pts.emplace_back(U(rng), U(rng));
    const Poly2 x = Poly2::monomial(1.0, 1, 0), y = Poly2::monomial(1.0, 0, 1);
    const Poly2 p1 = x * x * y;
    const Poly2 p2 = x * x * x * x + x * y * y * y * 3.0 - y * y + x * 0.5;
    double worst = 0.0;
    for (const Poly2& p : {p1, p2}) worst = std::max(worst, bochner_residual(p, pts));
    r.checks.push_back(at_most("Bochner identity residual on polynomials", worst, 1e-8));
  }
  r.seconds = seconds_since(t0);
  return r;
}

// --------------------------------------------------------------- criterion 10

CriterionResult criterion_10(const SuiteOptions&) {
  CriterionResult r;
  r.title = "log-Sobolev inequality on random fields";
  const auto t0 = Clock::now();
  const double h = 0.05;
  const TriMesh mesh = triangulate(circle_h(1.0, h), h);
  const FemOperators ops = assemble(mesh);
  const SobolevConstants k = log_sobolev_constants(mesh, ops, 7);
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int violations = 0, checks = 0;
  double margin = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100; ++trial) {
    Field phi(mesh.size());
    const int kind = trial % 3;
    if (kind == 0) {
      for (int i = 0; i < phi.size(); ++i) phi[i] = U(rng);
    } else {
      const int bumps = 1 + static_cast<int>(U(rng) * 4);
      std::vector<Vec2> c;
      std::vector<double> s, a;
      for (int b = 0; b < bumps; ++b) {
        const double rad = std::sqrt(U(rng)), th = 2.0 * kPi * U(rng);
        c.emplace_back(rad * std::cos(th), rad * std::sin(th));
        s.push_back(0.05 + 0.5 * U(rng));
        a.push_back(0.1 + U(rng));
      }
      for (int i = 0; i < phi.size(); ++i) {
        double v = kind == 2 ? 0.05 * U(rng) : 0.0;
        for (int b = 0; b < bumps; ++b) v += a[b] * std::exp(-(mesh.nodes[i] - c[b]).squaredNorm() / (2.0 * s[b] * s[b]));
        phi[i] = v;
      }
    }
    phi /= std::sqrt(phi.dot(ops.M * phi));
    for (double eps : {0.1, 1.0, 10.0}) {
      const LogSobolevCheck lc = log_sobolev_check(mesh, ops, phi, eps, k.c_S);
      ++checks;
      if (!lc.holds) ++violations;
      margin = std::min(margin, lc.lhs - lc.rhs);
    }
  }
  r.checks.push_back(at_most("violations in " + std::to_string(checks) + " checks", violations, 0.0,
                             "c_S " + num(k.c_S) + " (" + k.c_S_witness + "), smallest margin " + num(margin)));
  r.seconds = seconds_since(t0);
  return r;
}

// --------------------------------------------------------------- criterion 11

Curve peanut(int m) {
  std::vector<Vec2> v;
  const int dense = 4096;
  for (int i = 0; i < dense; ++i) {
    const double th = 2.0 * kPi * i / dense;
    const double rad = 1.0 + 0.3 * std::cos(2.0 * th);
    v.emplace_back(rad * std::cos(th), rad * std::sin(th));
  }
  return resample_uniform(Curve(v), m);
}

CriterionResult criterion_11(const SuiteOptions&) {
  CriterionResult r;
  r.title = "flow fidelity";
  const auto t0 = Clock::now();
  {
    const FlowTrajectory tr = run_flow(Curve::circle(1.0, 512), 0.75, 2);
    const Snapshot& s = tr[tr.size() - 1];
    const Vec2 c = s.curve.centroid();
    double R = 0.0;
    for (const auto& v : s.curve.vertices()) R += (v - c).norm();
    R /= s.curve.size();
    r.checks.push_back(at_most("circle: |R(0.375) - 0.5|", std::abs(R - 0.5), 1e-4, "t = " + num(s.t)));
  }
  const std::pair<const char*, Curve> curves[] = {
      {"circle", Curve::circle(1.0, 256)},
      {"ellipse 1.2 x 0.8", Curve::ellipse(1.2, 0.8, 256)},
      {"rounded square", Curve::rounded_square(1.0, 0.3, 256)},
      {"non-convex peanut", peanut(256)},
  };
  for (const auto& [name, c] : curves) {
    const FlowTrajectory tr = run_flow(c, 0.8, 41);
    double worst = 0.0;
    for (const auto& s : tr.snapshots) worst = std::max(worst, std::abs(s.area - tr[0].area + 2.0 * kPi * s.t));
    r.checks.push_back(at_most(std::string(name) + ": max |A(t) - A0 + 2 pi t|", worst, 1e-4,
                               "steps " + std::to_string(tr.steps)));
  }
  r.seconds = seconds_since(t0);
  return r;
}

}  // namespace

Check at_most(std::string name, double value, double limit, std::string note) {
  return {std::move(name), value, limit, "<=", value <= limit, std::move(note)};
}
Check at_least(std::string name, double value, double limit, std::string note) {
  return {std::move(name), value, limit, ">=", value >= limit, std::move(note)};
}
Check within(std::string name, double value, double lo, double hi, std::string note) {
  Check c{std::move(name), value, hi, "in", value >= lo && value <= hi, std::move(note)};
  c.note = "[" + num(lo) + ", " + num(hi) + "]" + (c.note.empty() ? "" : "; " + c.note);
  return c;
}
Check holds(std::string name, bool ok, std::string note) {
  return {std::move(name), ok ? 1.0 : 0.0, 1.0, "==", ok, std::move(note)};
}

bool CriterionResult::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

BackwardSolveState shrinker_state(const SuiteOptions& o) {
  return cached(o, "shrinker R0=1 m=512 t=[0,0.4]x401 h=0.02", [] {
    std::vector<double> times(401);
    for (int i = 0; i <= 400; ++i) times[i] = 0.4 * i / 400.0;
    const FlowTrajectory tr = analytic_shrinking_disk_trajectory(1.0, times, 512);
    const int k0 = tr.size() - 1;
    const EndData end = end_data(tr, k0, reference_h(tr, k0, 0.02));
    return backward_solve(tr, end);
  });
}

BackwardSolveState ellipse_state(int level, const SuiteOptions& o) {
  if (level < 0) throw ValidationError("refinement level must be non-negative");
  const double scale = std::pow(std::sqrt(2.0), level);
  const int m = static_cast<int>(std::lround(128.0 * scale));
  const double h0 = 0.064 / scale;
  return cached(o, "ellipse a=1.2 b=0.8 frac=0.6 m=" + std::to_string(m) + " h=" + fmt17(h0), [=] {
    const FlowTrajectory tr = run_flow(Curve::ellipse(1.2, 0.8, m), 0.6, 0);
    const int k0 = tr.size() - 1;
    const EndData end = end_data(tr, k0, reference_h(tr, k0, h0));
    return backward_solve(tr, end);
  });
}

CriterionResult run_criterion(int id, const SuiteOptions& o) {
  using Fn = CriterionResult (*)(const SuiteOptions&);
  static const Fn table[kCriteria] = {criterion_1, criterion_2, criterion_3, criterion_4,  criterion_5, criterion_6,
                                      criterion_7, criterion_8, criterion_9, criterion_10, criterion_11};
  if (id < 1 || id > kCriteria) throw ValidationError("criterion must be between 1 and " + std::to_string(kCriteria));
  CriterionResult r;
  const auto t0 = Clock::now();
  try {
    r = table[id - 1](o);
  } catch (const std::exception& e) {
    r.checks.push_back(holds("completed without error", false, e.what()));
    r.seconds = seconds_since(t0);
  }
  r.id = id;
  return r;
}

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "all") {
    std::vector<int> v(kCriteria);
    for (int i = 0; i < kCriteria; ++i) v[i] = i + 1;
    return v;
  }
  if (suite == "shrinker") return {1, 3};
  if (suite == "rate") return {2, 3};
  if (suite == "entropy") return {4, 5, 6, 7};
  if (suite == "collapse") return {8};
  if (suite == "identity") return {9};
  if (suite == "logsobolev") return {10};
  if (suite == "flow") return {11};
  throw ValidationError("unknown suite '" + suite + "'");
}

std::string summary_line(const CriterionResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s  criterion %2d  %s  (%.1f s)", r.pass() ? "PASS" : "FAIL", r.id, r.title.c_str(),
                r.seconds);
  return buf;
}

std::vector<std::string> detail_lines(const CriterionResult& r) {
  std::vector<std::string> out;
  for (const Check& c : r.checks) {
    std::string s = std::string("    ") + (c.pass ? "ok    " : "FAILED") + "  " + c.name + ": " + num(c.value);
    if (c.relation == "in")
      s += " in " + c.note;
    else {
      if (c.relation != "==") s += " " + c.relation + " " + num(c.limit);
      if (!c.note.empty()) s += "  (" + c.note + ")";
    }
    out.push_back(s);
  }
  for (const auto& n : r.notes) out.push_back("    note  " + n);
  return out;
}

}  // namespace elab::verify
