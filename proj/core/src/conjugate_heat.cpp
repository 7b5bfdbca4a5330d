#include "entropylab/conjugate_heat.hpp"

#include "entropylab/errors.hpp"
#include "entropylab/fem.hpp"
#include "entropylab/functional.hpp"
#include "entropylab/mesh.hpp"

#include <Eigen/SparseLU>
#include <spdlog/spdlog.h>

#include <cmath>
#include <optional>

namespace elab {

MeshMotion::MeshMotion(TriMesh reference, const Curve& reference_curve)
    : ref_(std::move(reference)), curve_size_(reference_curve.size()) {
  const int nb = ref_.n_boundary;
  const int n = ref_.size();
  segment_.assign(static_cast<size_t>(nb), 0);
  param_.assign(static_cast<size_t>(nb), 0.0);
  int last = -1;
  for (int k = 0; k < nb; ++k) {
    const int v = ref_.curve_vertex[k];
    if (v >= 0) {
      if (v >= curve_size_) throw ValidationError("mesh does not belong to the reference curve");
      last = v;
      continue;
    }
    if (last < 0) throw ValidationError("first boundary node must be a curve vertex");
    const Vec2 a = reference_curve[last];
    const Vec2 b = reference_curve[reference_curve.next(last)];
    segment_[k] = last;
    param_[k] = (ref_.nodes[k] - a).norm() / (b - a).norm();
  }
  for (int k = 0; k < nb; ++k)
    if (ref_.curve_vertex[k] >= 0) segment_[k] = ref_.curve_vertex[k];

  if (n > nb) {
    const SpMat K = assemble(ref_).K;
    K_IB_ = K.block(nb, 0, n - nb, nb);
    const SpMat KII = K.block(nb, nb, n - nb, n - nb);
    K_II_.compute(KII);
    if (K_II_.info() != Eigen::Success) throw NumericalError("conjugate_heat", "harmonic extension factorization failed");
  }
}

std::vector<Vec2> MeshMotion::nodes_for(const Curve& c) const {
  if (c.size() != curve_size_) throw ValidationError("curve vertex count differs from the reference curve");
  const int nb = ref_.n_boundary;
  const int n = ref_.size();
  std::vector<Vec2> out(ref_.nodes);
  Eigen::MatrixXd dB(nb, 2);
  for (int k = 0; k < nb; ++k) {
    const int v = segment_[k];
    const Vec2 p = ref_.curve_vertex[k] >= 0 ? c[v] : (1.0 - param_[k]) * c[v] + param_[k] * c[c.next(v)];
    dB.row(k) = (p - ref_.nodes[k]).transpose();
    out[k] = p;
  }
  if (n > nb) {
    const Eigen::MatrixXd rhs = -(K_IB_ * dB);
    const Eigen::MatrixXd dI = K_II_.solve(rhs);
    for (int i = 0; i < n - nb; ++i) out[nb + i] += dI.row(i).transpose();
  }
  return out;
}

namespace {

bool well_shaped(const TriMesh& m, double floor_deg) {
  for (int t = 0; t < static_cast<int>(m.tris.size()); ++t)
    if (!(m.triangle_area(t) > 1e-14)) return false;
  return min_angle_deg(m) >= floor_deg;
}

// Snapshot nodes by harmonic extension of the boundary motion, anchored at the
// end mesh. Once that folds a triangle or halves the smallest angle, the
// extension restarts from the last snapshot kept.
std::vector<std::vector<Vec2>> moved_nodes(const TriMesh& end_mesh, const FlowTrajectory& tr, int K0) {
  std::vector<std::vector<Vec2>> nodes(static_cast<size_t>(K0 + 1));
  nodes[K0] = end_mesh.nodes;
  const double floor_deg = 0.5 * min_angle_deg(end_mesh);
  std::optional<MeshMotion> motion;
  motion.emplace(end_mesh, tr[K0].curve);
  int anchor = K0, restarts = 0;
  for (int k = K0 - 1; k >= 0; --k) {
    nodes[k] = motion->nodes_for(tr[k].curve);
    if (anchor == k + 1 || well_shaped(end_mesh.with_nodes(nodes[k]), floor_deg)) continue;
    motion.emplace(end_mesh.with_nodes(nodes[k + 1]), tr[k + 1].curve);
    anchor = k + 1;
    ++restarts;
    nodes[k] = motion->nodes_for(tr[k].curve);
  }
  if (restarts > 0) spdlog::debug("conjugate_heat: mesh motion re-anchored {} times", restarts);
  return nodes;
}

}  // namespace

double reference_h(const FlowTrajectory& tr, int index, double h0) {
  if (index < 0 || index >= tr.size()) throw ValidationError("snapshot index out of range");
  if (!(h0 > 0.0)) throw ValidationError("h must be positive");
  return h0 * tr[index].length / tr[0].length;
}

Field snapshot_beta(const FlowTrajectory& tr, const TriMesh& mesh) {
  if (tr.stationary) return Field::Zero(mesh.n_boundary);
  return curvature_beta(mesh);
}

EndData end_data(const FlowTrajectory& tr, int t0_index, double h, const MinimizerOptions& mopt,
                 const MeshOptions& meshopt) {
  if (t0_index < 0 || t0_index >= tr.size()) throw ValidationError("t0 index out of range");
  const Snapshot& s = tr[t0_index];
  if (!(s.tau > 0.0)) throw ValidationError("tau must be positive at t0");
  EndData e;
  e.index = t0_index;
  e.mesh = triangulate(s.curve, h, meshopt);
  const FemOperators ops = assemble(e.mesh);
  e.beta = snapshot_beta(tr, e.mesh);
  e.minimizer = minimize(e.mesh, ops, s.tau, e.beta, mopt);
  if (!e.minimizer.converged)
    throw NumericalError("conjugate_heat", "end-data minimization did not converge", t0_index,
                         "raise max_iter or coarsen h");
  e.u = e.minimizer.phi.cwiseProduct(e.minimizer.phi);
  e.u /= ops.m.dot(e.u);
  return e;
}

BackwardSolveState backward_solve(const FlowTrajectory& tr, const EndData& end, const BackwardOptions& opt) {
  if (opt.substeps < 1) throw ValidationError("substeps must be at least 1");
  const int K0 = end.index;
  if (K0 < 1) throw ValidationError("backward solve needs at least two snapshots");
  if (end.u.size() != end.mesh.size()) throw ValidationError("end data does not match its mesh");

  BackwardSolveState st;
  st.trajectory = tr;
  st.trajectory.snapshots.resize(static_cast<size_t>(K0 + 1));
  st.reference = end.mesh;
  st.mu_end = end.minimizer.mu;
  const int n = end.mesh.size();

  st.nodes = moved_nodes(end.mesh, tr, K0);
  st.u.resize(static_cast<size_t>(K0 + 1));
  st.mass.assign(static_cast<size_t>(K0 + 1), 0.0);
  st.u[K0] = end.u;

  TriMesh cur = end.mesh;
  FemOperators ops = assemble(cur);
  Field u = end.u;
  st.mass[K0] = ops.m.dot(u);
  double prev_mass = st.mass[K0];
  const double mass0 = st.mass[K0];
  st.step_mass.push_back(mass0);

  Eigen::SparseLU<SpMat> lu;
  bool analysed = false;
  for (int k = K0; k >= 1; --k) {
    const double ds = (tr[k].t - tr[k - 1].t) / opt.substeps;
    if (!(ds > 0.0)) throw ValidationError("snapshot times must increase");
    for (int q = 1; q <= opt.substeps; ++q) {
      const double th = static_cast<double>(q) / opt.substeps;
      std::vector<Vec2> P(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) P[i] = (1.0 - th) * st.nodes[k][i] + th * st.nodes[k - 1][i];
      const TriMesh next = cur.with_nodes(P);
      const FemOperators nops = assemble(next);
      std::vector<Vec2> w(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) w[i] = (P[i] - cur.nodes[i]) / ds;
      SpMat A = ds * (nops.K + ale_convection(next, nops, w));
      for (int i = 0; i < n; ++i) A.coeffRef(i, i) += nops.m[i];
      A.makeCompressed();
      if (!analysed) {
        lu.analyzePattern(A);
        analysed = true;
      }
      lu.factorize(A);
      if (lu.info() != Eigen::Success)
        throw NumericalError("conjugate_heat", "implicit step factorization failed", k, "refine the trajectory in time");
      const Field rhs = ops.m.cwiseProduct(u);
      u = lu.solve(rhs);
      if (u.minCoeff() <= 0.0) {
        ++st.clamped_steps;
        spdlog::warn("conjugate_heat: non-positive density clamped at snapshot {}", k - 1);
        u = u.cwiseMax(1e-300);
      }
      cur = next;
      ops = nops;
      const double mass = ops.m.dot(u);
      st.max_step_drift = std::max(st.max_step_drift, std::abs(mass - prev_mass));
      st.max_drift = std::max(st.max_drift, std::abs(mass - mass0));
      st.step_mass.push_back(mass);
      prev_mass = mass;
    }
    st.u[k - 1] = u;
    st.mass[k - 1] = prev_mass;
  }
  st.drift_flagged = st.max_drift > opt.drift_budget || st.max_step_drift > opt.step_drift_budget;
  if (st.drift_flagged)
    spdlog::warn("conjugate_heat: mass drift {:.3e} (per step {:.3e}) beyond budget", st.max_drift, st.max_step_drift);
  return st;
}

Field f_from_state(const BackwardSolveState& st, int k) {
  if (k < 0 || k >= st.size()) throw ValidationError("snapshot index out of range");
  return f_from_u(st.u[k], st.trajectory[k].tau);
}

}  // namespace elab
