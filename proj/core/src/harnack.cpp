#include "entropylab/harnack.hpp"

#include "entropylab/errors.hpp"
#include "entropylab/functional.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace elab {

namespace {

// Three-point derivative in t on a possibly nonuniform grid; one-sided at the ends.
struct Stencil {
  int km = 0, kp = 0;
  double cm = 0.0, c0 = 0.0, cp = 0.0;
  bool one_sided = false;
};

Stencil time_stencil(const FlowTrajectory& tr, int k, int last) {
  if (last < 1) throw ValidationError("time derivatives need at least two snapshots");
  Stencil s;
  if (k == 0 || k == last) {
    s.one_sided = true;
    s.km = k == 0 ? 0 : k - 1;
    s.kp = k == 0 ? 1 : k;
    const double h = tr[s.kp].t - tr[s.km].t;
    // express as cm·x[km] + cp·x[kp]
    s.cm = -1.0 / h;
    s.cp = 1.0 / h;
    return s;
  }
  s.km = k - 1;
  s.kp = k + 1;
  const double hm = tr[k].t - tr[k - 1].t, hp = tr[k + 1].t - tr[k].t;
  s.cm = -hp / (hm * (hm + hp));
  s.c0 = (hp - hm) / (hm * hp);
  s.cp = hm / (hp * (hm + hp));
  return s;
}

template <class T>
T apply(const Stencil& s, const T& xm, const T& x0, const T& xp) {
  if (s.one_sided) return s.cm * xm + s.cp * xp;
  return s.cm * xm + s.c0 * x0 + s.cp * xp;
}

// Value of `vals` (per vertex of Y, linear along segments) where the normal line
// x + sν meets Y closest to x. Segments near `hint` are tried first.
double value_along_normal(const Vec2& x, const Vec2& nu, const Curve& Y, const Field& vals, int hint) {
  const int m = Y.size();
  auto search = [&](int lo, int hi, double* out) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = lo; j <= hi; ++j) {
      const int a = ((j % m) + m) % m;
      const int b = Y.next(a);
      double s = 0.0, p = 0.0;
      if (line_segment_hit(x, nu, Y[a], Y[b], &s, &p) && std::abs(s) < best) {
        best = std::abs(s);
        *out = (1.0 - p) * vals[a] + p * vals[b];
      }
    }
    return std::isfinite(best);
  };
  double v = 0.0;
  if (search(hint - 6, hint + 6, &v)) return v;
  if (search(0, m - 1, &v)) return v;
  throw NumericalError("harnack", "normal line misses the neighbouring curve");
}

struct Derivs {
  Eigen::MatrixXd D;
  int cx, cy, cxx, cxy, cyy;
  explicit Derivs(const LocalFit& fit, const Field& v)
      : D(fit.derivatives(v)),
        cx(fit.column(1, 0)),
        cy(fit.column(0, 1)),
        cxx(fit.column(2, 0)),
        cxy(fit.column(1, 1)),
        cyy(fit.column(0, 2)) {}
  Vec2 grad(int r) const { return Vec2(D(r, cx), D(r, cy)); }
  Eigen::Matrix2d hess(int r) const {
    Eigen::Matrix2d H;
    H << D(r, cxx), D(r, cxy), D(r, cxy), D(r, cyy);
    return H;
  }
};

// Rows of `fit` must be the boundary nodes 0..nb-1 in order.
double boundary_term_with(const BackwardSolveState& st, int k, const LocalFit& fit, const FemOperators& ops) {
  const int last = st.size() - 1;
  const Stencil s = time_stencil(st.trajectory, k, last);
  const TriMesh mesh = st.mesh(k);
  const int n = mesh.size(), nb = mesh.n_boundary;
  const double tau = st.trajectory[k].tau;

  const Field f = f_from_state(st, k);
  const Field fm = f_from_state(st, s.km), fp = f_from_state(st, s.kp);
  const Field fdot = apply(s, fm, f, fp);
  Field wx(n), wy(n);
  for (int i = 0; i < n; ++i) {
    const Vec2 w = apply(s, st.nodes[s.km][i], st.nodes[k][i], st.nodes[s.kp][i]);
    wx[i] = w.x();
    wy[i] = w.y();
  }
  const Derivs Df(fit, f), Dd(fit, fdot), Dwx(fit, wx), Dwy(fit, wy);
  const auto nu = mesh.boundary_curve().outward_normals();
  double sum = 0.0;
  for (int i = 0; i < nb; ++i) {
    const Vec2 g = Df.grad(i);
    const Eigen::Matrix2d H = Df.hess(i);
    const Vec2 w(wx[i], wy[i]);
    const Vec2& n_ = nu[i];
    // ∂ν of ∂ₜf = ḟ - w·∇f
    const double dn_ft = n_.dot(Dd.grad(i)) - (n_.dot(Dwx.grad(i)) * g.x() + n_.dot(Dwy.grad(i)) * g.y()) -
                         n_.dot(H * w);
    const double dWn = tau * (2.0 * n_.dot(H * g) - 2.0 * dn_ft) + n_.dot(g);
    sum += ops.b[i] * dWn * st.u[k][i];
  }
  return -sum;
}

std::vector<int> iota_nodes(int n) {
  std::vector<int> v(static_cast<size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

double volume_term(const LocalFit& fit, const FemOperators& ops, const Field& f, const Field& u, double tau) {
  if (!(tau > 0.0)) throw ValidationError("tau must be positive");
  if (fit.centres() != f.size()) throw ValidationError("fit centres must be every mesh node");
  const Derivs D(fit, f);
  const double d = 1.0 / (2.0 * tau);
  double sum = 0.0;
  for (int i = 0; i < f.size(); ++i) {
    const Eigen::Matrix2d E = D.hess(i) - d * Eigen::Matrix2d::Identity();
    sum += ops.m[i] * E.squaredNorm() * u[i];
  }
  return 2.0 * tau * sum;
}

double volume_term(const TriMesh& mesh, const FemOperators& ops, const Field& f, const Field& u, double tau,
                   const FitOptions& fo) {
  const LocalFit fit(mesh.nodes, iota_nodes(mesh.size()), fo);
  return volume_term(fit, ops, f, u, tau);
}

double boundary_term_direct(const BackwardSolveState& st, int k, const FitOptions& fo) {
  if (k < 0 || k >= st.size()) throw ValidationError("snapshot index out of range");
  const TriMesh mesh = st.mesh(k);
  const LocalFit fit(mesh.nodes, iota_nodes(mesh.n_boundary), fo);
  return boundary_term_with(st, k, fit, assemble(mesh));
}

HarnackTerm boundary_term_harnack(const BackwardSolveState& st, int k, const Field* V) {
  if (k < 0 || k >= st.size()) throw ValidationError("snapshot index out of range");
  const FlowTrajectory& tr = st.trajectory;
  const Stencil s = time_stencil(tr, k, st.size() - 1);
  const TriMesh mesh = st.mesh(k);
  const int nb = mesh.n_boundary;
  const Curve X = mesh.boundary_curve();
  const double tau = tr[k].tau;

  const Field beta = snapshot_beta(tr, mesh);
  const Field kappa = X.curvature();
  const Field f = f_from_state(st, k).head(nb);
  const Field fs = X.tangential_gradient(f);
  if (V && V->size() != nb) throw ValidationError("tangential field length does not match the boundary");
  const Field Vt = V ? *V : fs;
  const Field bs = X.tangential_gradient(beta);

  Field bt = Field::Zero(nb);
  if (!tr.stationary) {
    const TriMesh mm = st.mesh(s.km), mp = st.mesh(s.kp);
    const Curve Ym = mm.boundary_curve(), Yp = mp.boundary_curve();
    const Field bm = snapshot_beta(tr, mm), bp = snapshot_beta(tr, mp);
    const auto nu = X.outward_normals();
    for (int j = 0; j < nb; ++j) {
      const double vm = s.km == k ? beta[j] : value_along_normal(X[j], nu[j], Ym, bm, j);
      const double vp = s.kp == k ? beta[j] : value_along_normal(X[j], nu[j], Yp, bp, j);
      bt[j] = apply(s, vm, beta[j], vp);
    }
  }

  HarnackTerm h;
  h.one_sided = s.one_sided;
  h.integrand = bt - 2.0 * bs.cwiseProduct(Vt) + kappa.cwiseProduct(Vt.cwiseAbs2()) - beta / (2.0 * tau);
  const FemOperators ops = assemble(mesh);
  double sum = 0.0;
  for (int j = 0; j < nb; ++j) sum += ops.b[j] * h.integrand[j] * st.u[k][j];
  h.value = 2.0 * tau * sum;
  return h;
}

HarnackReport rate_identity_check(const BackwardSolveState& st, const HarnackOptions& opt) {
  const int K = st.size();
  if (K < 3) throw ValidationError("rate identity needs at least three snapshots");
  if (opt.stride < 1) throw ValidationError("stride must be at least 1");
  const FlowTrajectory& tr = st.trajectory;
  const int last = K - 1;

  HarnackReport rep;
  rep.window = opt.compat_window >= 0.0 ? opt.compat_window : 5.0 * (tr[last].t - tr[last - 1].t);
  rep.W_all.resize(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) {
    const TriMesh mesh = st.mesh(k);
    const FemOperators ops = assemble(mesh);
    rep.W_all[k] = w_beta(mesh, ops, f_from_state(st, k), tr[k].tau, snapshot_beta(tr, mesh)).W_beta;
  }

  bool nonneg = true;
  for (int k = 0; k < K; k += opt.stride) {
    HarnackRecord r;
    r.index = k;
    r.t = tr[k].t;
    r.tau = tr[k].tau;
    r.W_beta = rep.W_all[k];
    const Stencil s = time_stencil(tr, k, last);
    r.one_sided = s.one_sided;
    r.dW_dt_fd = apply(s, rep.W_all[s.km], rep.W_all[k], rep.W_all[s.kp]);

    const TriMesh mesh = st.mesh(k);
    const FemOperators ops = assemble(mesh);
    const LocalFit fit(mesh.nodes, iota_nodes(mesh.size()), opt.fit);
    const Field f = f_from_state(st, k);
    r.volume_term = volume_term(fit, ops, f, st.u[k], r.tau);
    r.boundary_term_direct = boundary_term_with(st, k, fit, ops);
    HarnackTerm h = boundary_term_harnack(st, k);
    r.boundary_term_harnack = h.value;
    if (opt.keep_integrand) r.integrand = std::move(h.integrand);
    r.conjecture_value = r.boundary_term_harnack;
    r.identity_gap_a = std::abs(r.dW_dt_fd - (r.volume_term + r.boundary_term_direct));
    r.identity_gap_gradw = std::abs(r.boundary_term_direct - r.boundary_term_harnack);
    r.retained = !r.one_sided && r.t <= tr[last].t - rep.window + 1e-12;
    if (r.retained) {
      rep.max_gap_a = std::max(rep.max_gap_a, r.identity_gap_a);
      rep.max_gap_gradw = std::max(rep.max_gap_gradw, r.identity_gap_gradw);
      nonneg = nonneg && r.conjecture_value >= 0.0;
    }
    rep.records.push_back(std::move(r));
  }
  rep.conjecture_nonnegative = nonneg;
  bool mono = true;
  for (int k = 1; k < K; ++k)
    if (tr[k].t <= tr[last].t - rep.window + 1e-12 && rep.W_all[k] < rep.W_all[k - 1] - 1e-6) mono = false;
  rep.W_nondecreasing = mono;
  return rep;
}

}  // namespace elab
