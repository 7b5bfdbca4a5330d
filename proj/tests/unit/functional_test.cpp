#include "common.hpp"

#include "entropylab/bounds.hpp"
#include "entropylab/functional.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace elab;
using test::circle_h;

namespace {

struct DiskMesh {
  TriMesh mesh;
  FemOperators ops;
};

DiskMesh disk(double R, double h) {
  DiskMesh s{triangulate(circle_h(R, h), h), {}};
  s.ops = assemble(s.mesh);
  return s;
}

Field gaussian_f(const TriMesh& mesh, double tau, Vec2 c = Vec2::Zero()) {
  Field f(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) f[i] = (mesh.nodes[i] - c).squaredNorm() / (4.0 * tau);
  return f;
}

// log(1 - e^{-R²/4τ}) from the radial integral of the heat kernel.
double disk_log_mass(double R, double tau) {
  return std::log(test::radial_integral([&](double r) { return std::exp(-r * r / (4 * tau)) / (4 * kPi * tau); }, R));
}

}  // namespace

TEST(Transforms, ExponentArithmeticAndRoundTrip) {
  const double tau = 1.0 / (4.0 * kPi);
  EXPECT_LE((u_from_f(Field::Zero(7), tau).array() - 1.0).abs().maxCoeff(), 1e-15);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N(0.0, 5.0);
  Field f(50);
  for (auto& x : f) x = N(rng);
  EXPECT_LE((f_from_u(u_from_f(f, 0.3), 0.3) - f).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Transforms, HeatKernelHasUnitMassOnLargeDisk) {
  const double tau = 0.5;
  const DiskMesh s = disk(8.0, 0.25);
  EXPECT_NEAR(std::exp(log_mass(s.ops, gaussian_f(s.mesh, tau), tau)), 1.0, 2e-3);
}

TEST(Normalize, Examples) {
  const double tau = 0.5;
  const DiskMesh s = disk(std::sqrt(2 * tau), 0.02);
  const Normalized n = normalize(s.ops, gaussian_f(s.mesh, tau), tau);
  EXPECT_NEAR(n.log_mass, -0.9327521, 2e-4);
  EXPECT_NEAR(n.log_mass, disk_log_mass(std::sqrt(2 * tau), tau), 2e-4);
  EXPECT_NEAR(normalize(s.ops, n.f, tau).log_mass, 0.0, 1e-13);
}

TEST(Normalize, TruncatedHalfPlane) {
  const double L = 5.0, h = 0.1, tau = 0.5;
  std::vector<Vec2> v;
  const Vec2 corners[] = {{-L, -L}, {L, -L}, {L, 0.0}, {-L, 0.0}};
  for (int k = 0; k < 4; ++k) {
    const Vec2 a = corners[k], b = corners[(k + 1) % 4];
    const int n = static_cast<int>(std::ceil((b - a).norm() / h));
    for (int j = 0; j < n; ++j) v.push_back(a + (b - a) * (double(j) / n));
  }
  const TriMesh mesh = triangulate(Curve(v), h);
  const FemOperators ops = assemble(mesh);
  EXPECT_NEAR(normalize(ops, gaussian_f(mesh, tau), tau).log_mass, std::log(0.5), 1e-4);
}

TEST(WBeta, ExplicitDiskCriticalPoint) {
  const double tau = 0.5;
  const DiskMesh s = disk(std::sqrt(2 * tau), 0.02);
  const Field beta = radial_beta(s.mesh, tau);
  EXPECT_LE((beta.array() - 1.0).abs().maxCoeff(), 1e-3);
  const Field f = normalize(s.ops, gaussian_f(s.mesh, tau), tau).f;
  const EntropyReport r = w_beta(s.mesh, s.ops, f, tau, beta);
  EXPECT_NEAR(r.W_beta, disk_log_mass(std::sqrt(2 * tau), tau), 5e-3);
  EXPECT_LE(r.ibp_gap, 1e-8);
}

TEST(WBeta, GaussianOnLargeDiskMatchesTruncatedValue) {
  // With S = R²/4τ the truncated Gaussian has
  // W = 2(1 - (1+S)e^{-S})/(1 - e^{-S}) + log(1 - e^{-S}) - 2, which is -2.345e-3 at S = 9.
  const double tau = 0.5, R = 6.0 * std::sqrt(tau), S = R * R / (4 * tau);
  const double exact = 2.0 * (1.0 - (1.0 + S) * std::exp(-S)) / (1.0 - std::exp(-S)) + std::log1p(-std::exp(-S)) - 2.0;
  const DiskMesh s = disk(R, 0.1);
  const Field f = normalize(s.ops, gaussian_f(s.mesh, tau), tau).f;
  EXPECT_NEAR(w_beta(s.mesh, s.ops, f, tau, Field::Zero(s.mesh.n_boundary)).W_beta, exact, 1e-3);
}

TEST(WBeta, AdditiveShiftCovariance) {
  const double tau = 0.3;
  const DiskMesh s = disk(1.0, 0.08);
  Field f = gaussian_f(s.mesh, tau, Vec2(0.2, -0.1));
  for (int i = 0; i < f.size(); ++i) f[i] += 0.3 * std::sin(3.0 * s.mesh.nodes[i].x());
  const Field beta = curvature_beta(s.mesh);
  const double w0 = w_beta(s.mesh, s.ops, f, tau, beta).W_beta;
  for (double a : {-4.0, 0.7, 12.0}) {
    const EntropyReport r = w_beta(s.mesh, s.ops, (f.array() + a).matrix(), tau, beta);
    EXPECT_NEAR(r.W_beta, w0, 1e-10);
    EXPECT_LE(r.ibp_gap, 1e-8);
  }
}

TEST(WBeta, ScalingLaw) {
  const double tau = 0.4, lambda = 3.0;
  const Vec2 x0(1.0, -2.0);
  const Curve c = Curve::ellipse(1.2, 0.8, 150);
  const TriMesh mesh = triangulate(c, 0.05);
  const FemOperators ops = assemble(mesh);
  std::vector<Vec2> scaled;
  for (const auto& p : mesh.nodes) scaled.push_back((p - x0) / lambda);
  const TriMesh smesh = mesh.with_nodes(scaled);
  const FemOperators sops = assemble(smesh);

  Field f(mesh.size()), beta(mesh.n_boundary);
  for (int i = 0; i < mesh.size(); ++i) f[i] = mesh.nodes[i].squaredNorm() / (4 * tau) + 0.2 * mesh.nodes[i].y();
  for (int k = 0; k < mesh.n_boundary; ++k) beta[k] = 0.5 + mesh.nodes[k].x();
  // f'(y) = f(λy + x₀) is the same nodal vector; β'(y) = λβ(λy + x₀)
  const double w = w_beta(mesh, ops, f, tau, beta).W_beta;
  const double ws = w_beta(smesh, sops, f, tau / (lambda * lambda), lambda * beta).W_beta;
  EXPECT_NEAR(ws, w, 1e-6);
}

TEST(WBeta, DivergenceCancellationIsSecondOrder) {
  // ∫(|x|²/2τ - 2)u dx + ∫x·ν u dS vanishes for the heat-kernel profile.
  const double tau = 0.5;
  std::vector<double> gap;
  for (double h : {0.08, 0.04}) {
    const DiskMesh s = disk(1.3, h);
    const Field u = u_from_f(gaussian_f(s.mesh, tau), tau);
    const auto nu = s.mesh.boundary_curve().outward_normals();
    double g = 0.0;
    for (int i = 0; i < s.mesh.size(); ++i) g += s.ops.m[i] * (s.mesh.nodes[i].squaredNorm() / (2 * tau) - 2.0) * u[i];
    for (int k = 0; k < s.mesh.n_boundary; ++k) g += s.ops.b[k] * s.mesh.nodes[k].dot(nu[k]) * u[k];
    gap.push_back(std::abs(g));
  }
  EXPECT_LE(gap[1], 5e-3);
  EXPECT_GE(gap[0] / gap[1], 3.0);
}

TEST(LowerBound, Monotonicity) {
  SobolevConstants c;
  c.c_S = 0.5;
  c.c_trace = 1.2;
  const double b0 = lower_bound_rhs(1.0, 0.0, c).total;
  EXPECT_TRUE(std::isfinite(b0));
  EXPECT_LT(b0, 0.0);
  SobolevConstants c2 = c;
  c2.c_S = 0.8;
  EXPECT_LT(lower_bound_rhs(1.0, 0.0, c2).total, b0);
  EXPECT_LT(lower_bound_rhs(1.0, 2.0, c).total, lower_bound_rhs(1.0, 1.0, c).total);
  // τ → 0⁺ has a finite limit
  EXPECT_NEAR(lower_bound_rhs(1e-12, 1.0, c).total, lower_bound_rhs(1e-14, 1.0, c).total, 1e-5);
  const LowerBoundChain ch = lower_bound_rhs(0.7, 1.5, c);
  EXPECT_NEAR(ch.total, ch.log_sobolev + ch.rescaling + ch.constant + ch.trace, 1e-12);
}

TEST(UpperBound, Examples) {
  const double c = upper_bound_constant();
  const Curve unit = Curve::circle(1.0, 4096);
  const UpperBound u = volume_ratio_upper_bound(unit, Field::Zero(unit.size()), Vec2::Zero(), 1.0);
  EXPECT_NEAR(u.value, std::log(kPi) + 4.0 * c, 1e-3 * c);
  // slab d = 1, r = 100: V ≈ 400, V(B_50) ≈ 200
  const UpperBound slab = volume_ratio_upper_bound(400.0, 200.0, 0.0, 100.0);
  EXPECT_NEAR(slab.log_term, std::log(400.0 / 1e4), 1e-12);
  // log term invariant under V → λ²V, r → λr
  EXPECT_NEAR(volume_ratio_upper_bound(9 * 3.0, 9 * 1.0, 0.0, 3 * 2.0).log_term,
              volume_ratio_upper_bound(3.0, 1.0, 0.0, 2.0).log_term, 1e-14);
}

TEST(LogSobolev, ConstantFieldAndRandomFields) {
  const DiskMesh s = disk(1.0, 0.05);
  const SobolevConstants k = log_sobolev_constants(s.mesh, s.ops);
  EXPECT_GT(k.c_S, 0.0);
  const Field phi = Field::Constant(s.mesh.size(), 1.0 / std::sqrt(s.ops.m.sum()));
  const LogSobolevCheck r = log_sobolev_check(s.mesh, s.ops, phi, 1.0, k.c_S);
  EXPECT_NEAR(r.lhs, std::log(s.ops.m.sum()), 1e-12);
  EXPECT_TRUE(r.holds);
  EXPECT_GT(r.lhs, r.rhs);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    Field p(s.mesh.size());
    for (auto& x : p) x = U(rng);
    p /= std::sqrt(p.dot(s.ops.M * p));
    for (double eps : {0.1, 1.0, 10.0}) EXPECT_TRUE(log_sobolev_check(s.mesh, s.ops, p, eps, k.c_S).holds);
  }
}

TEST(LogSobolev, GaussianProfileOnLargeDisk) {
  const DiskMesh s = disk(5.0, 0.2);
  const SobolevConstants k = log_sobolev_constants(s.mesh, s.ops);
  Field phi = u_from_f(gaussian_f(s.mesh, 0.5), 0.5).cwiseSqrt();
  phi /= std::sqrt(phi.dot(s.ops.M * phi));
  EXPECT_TRUE(log_sobolev_check(s.mesh, s.ops, phi, 1.0, k.c_S).holds);
}
