#include "common.hpp"

#include "entropylab/conjugate_heat.hpp"
#include "entropylab/local_fit.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace elab;
using test::linspace;

namespace {

double heat_kernel(const Vec2& x, const Vec2& c, double tau) {
  return std::exp(-(x - c).squaredNorm() / (4 * tau)) / (4 * kPi * tau);
}

// u-weighted L² distance between f from the state and |x|²/4τ + const,
// with the constant fitted.
double shrinker_f_error(const BackwardSolveState& st, int k) {
  const TriMesh mesh = st.mesh(k);
  const FemOperators ops = assemble(mesh);
  const Field f = f_from_state(st, k);
  const Field& u = st.u[k];
  Field q(mesh.size());
  for (int i = 0; i < q.size(); ++i) q[i] = mesh.nodes[i].squaredNorm() / (4 * st.trajectory[k].tau);
  const Field w = ops.m.cwiseProduct(u);
  const double shift = w.dot(f - q) / w.sum();
  return test::u_weighted_l2(ops, u, f, (q.array() + shift).matrix());
}

BackwardSolveState shrinker(double h, int snapshots, double t_end) {
  // boundary spacing close to h keeps the mesh well shaped
  const int m = std::max(64, static_cast<int>(std::ceil(2.0 * kPi / h)));
  const FlowTrajectory tr = analytic_shrinking_disk_trajectory(1.0, linspace(0.0, t_end, snapshots), m);
  const int k0 = tr.size() - 1;
  return backward_solve(tr, end_data(tr, k0, reference_h(tr, k0, h)));
}

}  // namespace

TEST(EndData, ShrinkingDiskProfile) {
  const FlowTrajectory tr = analytic_shrinking_disk_trajectory(1.0, {0.0, 0.1, 0.2}, 256);
  const EndData e = end_data(tr, 2, 0.04);
  const FemOperators ops = assemble(e.mesh);
  EXPECT_NEAR(ops.m.dot(e.u), 1.0, 1e-8);
  EXPECT_GT(e.u.minCoeff(), 0.0);
  // u = c·heat kernel with τ₀ = 0.3
  Field g(e.mesh.size());
  for (int i = 0; i < g.size(); ++i) g[i] = heat_kernel(e.mesh.nodes[i], Vec2::Zero(), 0.3);
  g /= ops.m.dot(g);
  EXPECT_LE((e.u - g).cwiseAbs().maxCoeff() / g.maxCoeff(), 5e-3);
}

TEST(BackwardSolve, StationaryDomainConservesMassExactly) {
  const Curve c = Curve::ellipse(1.2, 0.8, 120);
  const FlowTrajectory tr = stationary_trajectory(c, linspace(0.0, 0.3, 31), 1.0);
  const EndData e = end_data(tr, 30, 0.07);
  const BackwardSolveState st = backward_solve(tr, e);
  for (double m : st.mass) EXPECT_NEAR(m, 1.0, 1e-12);
  for (const auto& u : st.u) EXPECT_GT(u.minCoeff(), 0.0);
}

TEST(BackwardSolve, ShrinkerMatchesExplicitSolution) {
  const BackwardSolveState st = shrinker(0.02, 101, 0.1);
  double worst = 0.0, drift = 0.0;
  for (int k = 0; k < st.size(); k += 10) worst = std::max(worst, shrinker_f_error(st, k));
  for (double m : st.mass) drift = std::max(drift, std::abs(m - 1.0));
  EXPECT_LE(worst, 5e-3);
  EXPECT_LE(drift, 1e-3);
  EXPECT_LE(st.max_step_drift, 1e-5);
  for (const auto& u : st.u) EXPECT_GT(u.minCoeff(), 0.0);
}

TEST(BackwardSolve, ShrinkerRefinement) {
  // halving h and quartering the snapshot spacing
  const BackwardSolveState a = shrinker(0.08, 11, 0.1), b = shrinker(0.04, 41, 0.1);
  EXPECT_GE(shrinker_f_error(a, 0) / shrinker_f_error(b, 0), 3.0);
}

TEST(BackwardSolve, TwoGaussiansOnLargeFixedDomain) {
  // u = ½(G_{x₀,τ} + G_{x₁,τ}) solves (∂ₜ + Δ)u = 0 with flux through |x| = 9 below 1e-4 of the peak.
  const double a = 1.5, t0 = 0.5;
  const Vec2 c0(-1.0, 0.0), c1(1.0, 0.0);
  auto run = [&](double h, int snapshots) {
    const FlowTrajectory tr = stationary_trajectory(test::circle_h(9.0, h), linspace(0.0, t0, snapshots), a);
    EndData e;
    e.index = tr.size() - 1;
    e.mesh = triangulate(tr[e.index].curve, h);
    e.beta = Field::Zero(e.mesh.n_boundary);
    const FemOperators ops = assemble(e.mesh);
    e.u.resize(e.mesh.size());
    for (int i = 0; i < e.u.size(); ++i)
      e.u[i] = 0.5 * (heat_kernel(e.mesh.nodes[i], c0, a - t0) + heat_kernel(e.mesh.nodes[i], c1, a - t0));
    e.u /= ops.m.dot(e.u);
    const BackwardSolveState st = backward_solve(tr, e);
    Field exact(e.mesh.size());
    for (int i = 0; i < exact.size(); ++i)
      exact[i] = 0.5 * (heat_kernel(e.mesh.nodes[i], c0, a) + heat_kernel(e.mesh.nodes[i], c1, a));
    return std::sqrt(ops.m.dot((st.u[0] - exact).cwiseAbs2())) / std::sqrt(ops.m.dot(exact.cwiseAbs2()));
  };
  const double coarse = run(0.3, 11), fine = run(0.15, 41);
  EXPECT_LE(fine, 0.02);
  EXPECT_LT(fine, 0.5 * coarse);
}

TEST(FromState, RoundTripAndNeumannData) {
  const BackwardSolveState st = shrinker(0.05, 11, 0.1);
  const int k = 5;
  const Field f = f_from_state(st, k);
  EXPECT_LE((u_from_f(f, st.trajectory[k].tau) - st.u[k]).cwiseAbs().maxCoeff(), 1e-12 * st.u[k].maxCoeff());
  // ⟨∇f, ν⟩ ≈ H on the boundary
  const TriMesh mesh = st.mesh(k);
  std::vector<int> centres(static_cast<size_t>(mesh.n_boundary));
  std::iota(centres.begin(), centres.end(), 0);
  const LocalFit fit(mesh.nodes, centres);
  const auto D = fit.derivatives(f);
  const auto nu = mesh.boundary_curve().outward_normals();
  const double R = std::sqrt(1.0 - 2.0 * st.trajectory[k].t);
  double worst = 0.0;
  for (int j = 0; j < mesh.n_boundary; ++j)
    worst = std::max(worst, std::abs(D(j, fit.column(1, 0)) * nu[j].x() + D(j, fit.column(0, 1)) * nu[j].y() - 1.0 / R));
  EXPECT_LE(worst, 0.05);
}

TEST(MeshMotion, FollowsTheBoundary) {
  const Curve c0 = Curve::circle(1.0, 128), c1 = Curve::circle(0.8, 128);
  const TriMesh ref = triangulate(c0, 0.1);
  const MeshMotion motion(ref, c0);
  const TriMesh moved = motion.mesh_for(c1);
  EXPECT_NEAR(moved.area(), c1.signed_area(), 1e-10);
  EXPECT_NO_THROW(check_orientation(moved));
}
