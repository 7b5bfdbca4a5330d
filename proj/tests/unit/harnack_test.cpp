#include "common.hpp"

#include "entropylab/harnack.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

using namespace elab;
using test::linspace;

namespace {

struct Disk {
  TriMesh mesh;
  FemOperators ops;
};

Disk disk(double R, double h) {
  Disk d{triangulate(test::circle_h(R, h), h), {}};
  d.ops = assemble(d.mesh);
  return d;
}

Field shrinker_f(const TriMesh& mesh, double tau, double eps = 0.0) {
  Field f(mesh.size());
  for (int i = 0; i < f.size(); ++i) {
    const Vec2& x = mesh.nodes[i];
    f[i] = x.squaredNorm() / (4 * tau) + eps * x.x() * x.x() * x.x();
  }
  return f;
}

const BackwardSolveState& shrinker_state() {
  static const BackwardSolveState st = [] {
    const FlowTrajectory tr = analytic_shrinking_disk_trajectory(1.0, linspace(0.0, 0.2, 41), 256);
    const int k0 = tr.size() - 1;
    return backward_solve(tr, end_data(tr, k0, reference_h(tr, k0, 0.04)));
  }();
  return st;
}

}  // namespace

TEST(VolumeTerm, VanishesOnHeatKernelProfile) {
  const double tau = 0.5;
  const Disk d = disk(1.0, 0.02);
  const Field f = shrinker_f(d.mesh, tau);
  EXPECT_LE(std::abs(volume_term(d.mesh, d.ops, f, u_from_f(f, tau), tau)), 1e-3);
}

TEST(VolumeTerm, CubicPerturbationMatchesQuadrature) {
  // |∇²f - I/2τ|² = (6εx₁)² for f = |x|²/4τ + εx₁³
  const double tau = 0.5, eps = 0.05, R = 1.0;
  const Disk d = disk(R, 0.03);
  const Field f = shrinker_f(d.mesh, tau, eps);
  const Field u = u_from_f(f, tau);
  using boost::math::quadrature::gauss_kronrod;
  const double oracle = 2.0 * tau * gauss_kronrod<double, 31>::integrate(
      [&](double r) {
        return r * gauss_kronrod<double, 31>::integrate(
                       [&](double th) {
                         const double x = r * std::cos(th);
                         const double fx = r * r / (4 * tau) + eps * x * x * x;
                         return 36.0 * eps * eps * x * x * std::exp(-fx) / (4 * kPi * tau);
                       },
                       0.0, 2.0 * kPi, 5, 1e-12);
      },
      0.0, R, 8, 1e-11);
  const double v = volume_term(d.mesh, d.ops, f, u, tau);
  EXPECT_GT(v, 0.0);
  EXPECT_NEAR(v, oracle, 0.1 * oracle);
}

TEST(VolumeTerm, PositiveWhenTauDoesNotMatch) {
  const Disk d = disk(1.0, 0.05);
  const Field f = shrinker_f(d.mesh, 0.5);
  EXPECT_GT(volume_term(d.mesh, d.ops, f, u_from_f(f, 1.0), 1.0), 1e-3);
}

TEST(Shrinker, AllTermsVanish) {
  const BackwardSolveState& st = shrinker_state();
  for (int k : {5, 20, 35}) {
    const HarnackTerm h = boundary_term_harnack(st, k);
    EXPECT_LE(h.integrand.cwiseAbs().maxCoeff(), 1e-2) << k;
    EXPECT_LE(std::abs(h.value), 5e-3) << k;
  }
  HarnackOptions o;
  o.stride = 4;
  const HarnackReport rep = rate_identity_check(st, o);
  for (double w : rep.W_all) EXPECT_NEAR(w, rep.W_all.front(), 5e-3);
  for (const auto& r : rep.records) {
    if (!r.retained) continue;
    EXPECT_LE(std::abs(r.dW_dt_fd), 5e-3);
    EXPECT_LE(std::abs(r.volume_term), 5e-3);
    EXPECT_LE(std::abs(r.boundary_term_harnack), 5e-3);
  }
}

TEST(Shrinker, DirectTermWithExactData) {
  // homothetic meshes carrying the exact profile u = c·e^{-|x|²/4τ}/4πτ
  const FlowTrajectory tr = analytic_shrinking_disk_trajectory(1.0, linspace(0.0, 0.2, 41), 256);
  BackwardSolveState st;
  st.trajectory = tr;
  const double R0 = std::sqrt(1.0 - 2.0 * tr.snapshots.back().t);
  st.reference = triangulate(tr.snapshots.back().curve, 0.03);
  const FemOperators ref_ops = assemble(st.reference);
  for (int k = 0; k < tr.size(); ++k) {
    const double s = std::sqrt(1.0 - 2.0 * tr[k].t) / R0;
    std::vector<Vec2> nodes;
    for (const auto& p : st.reference.nodes) nodes.push_back(s * p);
    Field u(static_cast<Eigen::Index>(nodes.size()));
    for (int i = 0; i < u.size(); ++i) u[i] = std::exp(-nodes[i].squaredNorm() / (4 * tr[k].tau));
    u /= (s * s) * ref_ops.m.dot(u);
    st.nodes.push_back(std::move(nodes));
    st.u.push_back(std::move(u));
    st.mass.push_back(1.0);
  }
  for (int k : {5, 20, 35}) EXPECT_LE(std::abs(boundary_term_direct(st, k)), 2e-3) << k;
}

TEST(FrozenDomain, HarnackTermReducesToSecondFundamentalForm) {
  // β = 0 on a fixed convex domain: 2τ∫κ (∂ₛf)² u dS
  const Curve c = Curve::ellipse(1.2, 0.8, 160);
  const FlowTrajectory tr = stationary_trajectory(c, linspace(0.0, 0.2, 21), 0.6);
  const BackwardSolveState st = backward_solve(tr, end_data(tr, 20, 0.06));
  const int k = 10;
  const TriMesh mesh = st.mesh(k);
  const FemOperators ops = assemble(mesh);
  const Curve X = mesh.boundary_curve();
  const Field f = f_from_state(st, k).head(mesh.n_boundary);
  const Field fs = X.tangential_gradient(f);
  double expect = 0.0;
  for (int j = 0; j < mesh.n_boundary; ++j) expect += ops.b[j] * X.curvature()[j] * fs[j] * fs[j] * st.u[k][j];
  expect *= 2.0 * tr[k].tau;
  const HarnackTerm h = boundary_term_harnack(st, k);
  EXPECT_NEAR(h.value, expect, 1e-12 + 1e-10 * std::abs(expect));
  EXPECT_GE(h.value, 0.0);
  EXPECT_GE(boundary_term_direct(st, k), -1e-3);
}

TEST(RateIdentity, TangentialFieldOverride) {
  const BackwardSolveState& st = shrinker_state();
  const Field zero = Field::Zero(st.reference.n_boundary);
  const HarnackTerm a = boundary_term_harnack(st, 10, &zero);
  EXPECT_TRUE(std::isfinite(a.value));
  const Field wrong = Field::Zero(3);
  EXPECT_THROW(boundary_term_harnack(st, 10, &wrong), std::invalid_argument);
  EXPECT_THROW(boundary_term_direct(st, st.size()), std::invalid_argument);
}
