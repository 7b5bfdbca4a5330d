#include "entropylab/flow.hpp"

#include "entropylab/constants.hpp"
#include "entropylab/errors.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <sstream>

namespace elab {

namespace {

// Cyclic tridiagonal solve a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i by
// Sherman–Morrison around the Thomas algorithm; two right-hand sides.
void cyclic_solve(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& c,
                  std::vector<Vec2>& d) {
  const int m = static_cast<int>(b.size());
  const double gamma = -b[0];
  std::vector<double> bb(b);
  bb[0] -= gamma;
  bb[m - 1] -= c[m - 1] * a[0] / gamma;
  std::vector<double> u(static_cast<size_t>(m), 0.0);
  u[0] = gamma;
  u[m - 1] = c[m - 1];

  // Thomas for [d | u] with sub-diagonal a[1..], super-diagonal c[..m-2]
  std::vector<double> cp(static_cast<size_t>(m));
  std::vector<Vec2> dp(static_cast<size_t>(m));
  std::vector<double> up(static_cast<size_t>(m));
  cp[0] = c[0] / bb[0];
  dp[0] = d[0] / bb[0];
  up[0] = u[0] / bb[0];
  for (int i = 1; i < m; ++i) {
    const double den = bb[i] - a[i] * cp[i - 1];
    cp[i] = i < m - 1 ? c[i] / den : 0.0;
    dp[i] = (d[i] - a[i] * dp[i - 1]) / den;
    up[i] = (u[i] - a[i] * up[i - 1]) / den;
  }
  for (int i = m - 2; i >= 0; --i) {
    dp[i] -= cp[i] * dp[i + 1];
    up[i] -= cp[i] * up[i + 1];
  }
  const double vn = a[0] / gamma;
  const Vec2 num = dp[0] + vn * dp[m - 1];
  const double den = 1.0 + up[0] + vn * up[m - 1];
  for (int i = 0; i < m; ++i) d[i] = dp[i] - up[i] * (num / den);
}

struct LapCoeffs {
  std::vector<double> cm, cp;  // weights of x_{i-1} and x_{i+1}
};

// Curvature-vector operator κν ≈ Σ weights·(neighbour - x). The θ/sin θ factor
// makes the discrete area rate exactly -Σθ = -2π.
LapCoeffs lap_coeffs(const Curve& c) {
  const int m = c.size();
  const auto L = c.segment_lengths();
  const Field th = c.turning_angles();
  LapCoeffs k{std::vector<double>(static_cast<size_t>(m)), std::vector<double>(static_cast<size_t>(m))};
  for (int i = 0; i < m; ++i) {
    const double Lm = L[c.prev(i)], Lp = L[i];
    const double fac = std::abs(th[i]) > 1e-8 ? th[i] / std::sin(th[i]) : 1.0;
    const double w = 2.0 / (Lp + Lm) * fac;
    k.cm[i] = w / Lm;
    k.cp[i] = w / Lp;
  }
  return k;
}

// (I - θ dt Λ) Y = X + (1-θ) dt Λ X
std::vector<Vec2> implicit(const Curve& X, const LapCoeffs& k, double dt, double theta) {
  const int m = X.size();
  std::vector<double> a(static_cast<size_t>(m)), b(static_cast<size_t>(m)), c(static_cast<size_t>(m));
  std::vector<Vec2> rhs(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    const Vec2 lap = k.cm[i] * (X[X.prev(i)] - X[i]) + k.cp[i] * (X[X.next(i)] - X[i]);
    rhs[i] = X[i] + (1.0 - theta) * dt * lap;
    a[i] = -theta * dt * k.cm[i];
    c[i] = -theta * dt * k.cp[i];
    b[i] = 1.0 + theta * dt * (k.cm[i] + k.cp[i]);
  }
  cyclic_solve(a, b, c, rhs);
  return rhs;
}

Snapshot make_snapshot(double t, double a, const Curve& c) {
  return Snapshot{t, a - t, c, c.signed_area(), c.length()};
}

}  // namespace

double max_stable_dt(const Curve& c) {
  const double s = c.min_segment();
  return 0.4 * s * s;
}

Curve csf_step(const Curve& c, double dt) {
  if (!(dt > 0.0)) throw ValidationError("time step must be positive");
  if (dt > max_stable_dt(c) * (1.0 + 1e-9))
    throw ValidationError("time step exceeds 0.4 x (min segment)^2");
  const Curve half{implicit(c, lap_coeffs(c), 0.5 * dt, 1.0)};
  const Curve full{implicit(c, lap_coeffs(half), dt, 0.5)};
  return resample_uniform(full, c.size(), 0.0);
}

FlowTrajectory run_flow(const Curve& c0, double frac, int snapshot_count, const FlowOptions& opt) {
  c0.require_simple_ccw(8);
  if (!(frac > 0.0 && frac <= 0.95)) throw ValidationError("t_end_fraction must lie in (0, 0.95]");
  if (snapshot_count == 1 || snapshot_count < 0) throw ValidationError("snapshot_count must be 0 or at least 2");
  if (!(opt.dt_scale > 0.0)) throw ValidationError("dt scale must be positive");

  FlowTrajectory tr;
  const double A0 = c0.signed_area();
  tr.T_est = A0 / (2.0 * kPi);
  tr.a = std::isnan(opt.a) ? tr.T_est : opt.a;
  if (tr.a < tr.T_est * (1.0 - 1e-12)) throw ValidationError("a must be at least the singular-time estimate");
  const double t1 = frac * tr.T_est;
  const int m = c0.size();

  // after redistribution all segments equal L/m ≥ √(4πA)/m, and A(t) ≥ A(t₁)
  const double A1 = A0 - 2.0 * kPi * t1;
  const double seg_floor = std::sqrt(4.0 * kPi * A1) / m;
  const double dt0 = opt.dt_scale * std::min(max_stable_dt(c0), 0.4 * seg_floor * seg_floor);

  long intervals, per;
  if (snapshot_count == 0) {
    intervals = static_cast<long>(std::ceil(t1 / dt0));
    per = 1;
  } else {
    intervals = snapshot_count - 1;
    per = static_cast<long>(std::ceil(t1 / intervals / dt0));
  }
  const long total = intervals * per;
  tr.dt = t1 / static_cast<double>(total);
  tr.snapshots.reserve(static_cast<size_t>(intervals + 1));
  tr.snapshots.push_back(make_snapshot(0.0, tr.a, c0));

  Curve c = c0;
  for (long s = 1; s <= total; ++s) {
    c = csf_step(c, tr.dt);
    const double t = s * tr.dt;
    if (!c.embedded()) {
      std::ostringstream os;
      os << "curve self-intersects at t = " << t;
      throw NumericalError("flow", os.str(), static_cast<long>(tr.snapshots.size()), "reduce dt-scale");
    }
    tr.steps = s;
    const Field k = c.curvature();
    const double mean_seg = c.length() / c.size();
    if (1.0 / k.cwiseAbs().maxCoeff() < opt.singular_radius_factor * mean_seg) {
      tr.truncated = true;
      std::ostringstream os;
      os << "singularity approached at t = " << t << " (curvature radius below " << opt.singular_radius_factor
         << " segment lengths)";
      tr.note = os.str();
      spdlog::warn("flow: {}", tr.note);
      tr.snapshots.push_back(make_snapshot(t, tr.a, c));
      break;
    }
    if (s % per == 0) tr.snapshots.push_back(make_snapshot(t, tr.a, c));
  }
  return tr;
}

FlowTrajectory analytic_shrinking_disk_trajectory(double R0, const std::vector<double>& times, int vertices) {
  if (!(R0 > 0.0)) throw ValidationError("initial radius must be positive");
  if (times.empty()) throw ValidationError("need at least one time");
  FlowTrajectory tr;
  tr.T_est = 0.5 * R0 * R0;
  tr.a = tr.T_est;
  double prev = -std::numeric_limits<double>::infinity();
  for (double t : times) {
    if (!(t < tr.T_est)) throw ValidationError("time beyond the extinction time R0^2/2");
    if (!(t > prev)) throw ValidationError("times must be strictly increasing");
    prev = t;
    tr.snapshots.push_back(make_snapshot(t, tr.a, Curve::circle(std::sqrt(R0 * R0 - 2.0 * t), vertices)));
  }
  return tr;
}

FlowTrajectory stationary_trajectory(const Curve& c, const std::vector<double>& times, double a) {
  if (times.empty()) throw ValidationError("need at least one time");
  FlowTrajectory tr;
  tr.a = a;
  tr.T_est = a;
  tr.stationary = true;
  double prev = -std::numeric_limits<double>::infinity();
  for (double t : times) {
    if (!(t > prev)) throw ValidationError("times must be strictly increasing");
    if (!(a - t > 0.0)) throw ValidationError("tau must stay positive");
    prev = t;
    tr.snapshots.push_back(make_snapshot(t, a, c));
  }
  return tr;
}

}  // namespace elab
