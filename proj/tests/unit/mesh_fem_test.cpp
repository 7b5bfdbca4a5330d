#include "common.hpp"

#include <Eigen/SparseCholesky>
#include <gtest/gtest.h>

using namespace elab;
using test::circle_h;

namespace {

double interior_distance(const Vec2& p, double R) { return R - p.norm(); }

}  // namespace

TEST(Triangulate, AreaExamples) {
  EXPECT_NEAR(triangulate(circle_h(1.0, 0.05), 0.05).area(), kPi, 3e-3);
  const Vec2 sq[] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_NEAR(triangulate(Curve::polygon(sq), 0.25).area(), 1.0, 1e-14);
  EXPECT_NEAR(triangulate(Curve::ellipse(2.0, 1.0, 200), 0.05).area(), 2.0 * kPi, 5e-3);
}

TEST(Triangulate, Invariants) {
  const Curve c = Curve::ellipse(1.2, 0.8, 120);
  const TriMesh mesh = triangulate(c, 0.06);
  for (int t = 0; t < static_cast<int>(mesh.tris.size()); ++t) EXPECT_GT(mesh.triangle_area(t), 1e-14);
  EXPECT_NO_THROW(check_orientation(mesh));
  // boundary loop follows the generating curve
  ASSERT_GE(mesh.n_boundary, c.size());
  for (int k = 0; k < mesh.n_boundary; ++k) EXPECT_LE(c.distance(mesh.nodes[k]), 0.06 * 0.06);
  // conforming: every interior edge is shared by exactly two triangles
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : mesh.tris)
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  int boundary_edges = 0;
  for (const auto& [edge, n] : count) {
    EXPECT_LE(n, 2);
    boundary_edges += n == 1;
  }
  EXPECT_EQ(boundary_edges, mesh.n_boundary);
  EXPECT_GE(min_angle_deg(mesh), 20.0);
}

TEST(Triangulate, Deterministic) {
  const Curve c = Curve::rounded_square(1.0, 0.3, 160);
  const TriMesh a = triangulate(c, 0.07), b = triangulate(c, 0.07);
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(a.tris, b.tris);
  for (int i = 0; i < a.size(); ++i) EXPECT_EQ(a.nodes[i], b.nodes[i]);
}

TEST(Assemble, PartitionOfUnityAndKernel) {
  const TriMesh mesh = triangulate(Curve::ellipse(1.2, 0.8, 100), 0.07);
  const FemOperators ops = assemble(mesh);
  const Field one = Field::Ones(mesh.size());
  EXPECT_NEAR(one.dot(ops.M * one), mesh.area(), 1e-10);
  EXPECT_NEAR(ops.m.sum(), mesh.area(), 1e-10);
  EXPECT_LE((ops.K * one).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(ops.b.sum(), mesh.boundary_curve().length(), 1e-8);
  const SpMat B = ops.boundary_mass(mesh, Field::Ones(mesh.n_boundary));
  EXPECT_NEAR(one.dot(B * one), mesh.boundary_curve().length(), 1e-8);
}

TEST(Assemble, DirichletEigenvalueOfUnitDisk) {
  const TriMesh mesh = triangulate(circle_h(1.0, 0.03), 0.03);
  const FemOperators ops = assemble(mesh);
  const int nb = mesh.n_boundary, ni = mesh.size() - nb;
  const SpMat K = ops.K.bottomRightCorner(ni, ni), M = ops.M.bottomRightCorner(ni, ni);
  Eigen::SimplicialLDLT<SpMat> solver(K);
  Field x = Field::Ones(ni);
  double lambda = 0.0;
  for (int it = 0; it < 300; ++it) {
    x = solver.solve(M * x);
    x /= std::sqrt(x.dot(M * x));
    lambda = x.dot(K * x);
  }
  const double j01 = 2.404825557695773;
  EXPECT_NEAR(lambda, j01 * j01, 0.01 * j01 * j01);
}

TEST(Recovery, LinearFieldExact) {
  const TriMesh mesh = triangulate(circle_h(1.0, 0.1), 0.1);
  Field f(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) f[i] = mesh.nodes[i].x();
  const auto g = recover_gradient(mesh, f);
  const auto H = recover_hessian(mesh, f);
  for (int i = 0; i < mesh.size(); ++i) {
    EXPECT_LE((g[i] - Vec2(1.0, 0.0)).norm(), 1e-8);
    EXPECT_LE(H[i].cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Recovery, QuadraticHessiansInterior) {
  for (double h : {0.08, 0.04}) {
    const TriMesh mesh = triangulate(circle_h(1.0, h), h);
    Field q(mesh.size()), xy(mesh.size());
    for (int i = 0; i < mesh.size(); ++i) {
      q[i] = mesh.nodes[i].squaredNorm() / 4.0;
      xy[i] = mesh.nodes[i].x() * mesh.nodes[i].y();
    }
    const auto Hq = recover_hessian(mesh, q), Hxy = recover_hessian(mesh, xy);
    double eq = 0.0, exy = 0.0;
    for (int i = 0; i < mesh.size(); ++i) {
      if (interior_distance(mesh.nodes[i], 1.0) < 3.0 * h) continue;
      eq = std::max(eq, (Hq[i] - 0.5 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff());
      exy = std::max(exy, std::abs(Hxy[i](0, 1) - 1.0));
    }
    // O(h) on unstructured meshes
    EXPECT_LE(eq, 2.0 * h);
    EXPECT_LE(exy, 4.0 * h);
  }
}

TEST(Interpolate, IdentityLinearAndQuadratic) {
  const TriMesh src = triangulate(circle_h(1.0, 0.05), 0.05);
  Field lin(src.size()), sq(src.size());
  for (int i = 0; i < src.size(); ++i) {
    lin[i] = src.nodes[i].x() + 2.0 * src.nodes[i].y();
    sq[i] = src.nodes[i].squaredNorm();
  }
  EXPECT_LE((interpolate(src, lin, src) - lin).cwiseAbs().maxCoeff(), 1e-12);

  const TriMesh dst = triangulate(circle_h(0.95, 0.03), 0.03);
  const Field li = interpolate(src, lin, dst), qi = interpolate(src, sq, dst);
  double el = 0.0, eq = 0.0;
  for (int i = 0; i < dst.size(); ++i) {
    el = std::max(el, std::abs(li[i] - (dst.nodes[i].x() + 2.0 * dst.nodes[i].y())));
    eq = std::max(eq, std::abs(qi[i] - dst.nodes[i].squaredNorm()));
  }
  EXPECT_LE(el, 1e-12);
  // P1 interpolation error of |x|² is at most h²/4 per edge direction
  EXPECT_LE(eq, 0.05 * 0.05);
}

TEST(WeakLaplacian, ConsistentWithNeumannField) {
  // f = r⁴/4 - r²/2 has ∂_r f = 0 on the unit circle, so gᵀKf -> ∫∇g·∇f = -∫gΔf.
  // With g = r² both sides equal -π/3.
  std::vector<double> err;
  for (double h : {0.1, 0.05, 0.025}) {
    const TriMesh mesh = triangulate(circle_h(1.0, h), h);
    const FemOperators ops = assemble(mesh);
    Field f(mesh.size()), g(mesh.size());
    for (int i = 0; i < mesh.size(); ++i) {
      const double r2 = mesh.nodes[i].squaredNorm();
      f[i] = r2 * r2 / 4.0 - r2 / 2.0;
      g[i] = r2;
    }
    err.push_back(std::abs(g.dot(ops.K * f) + kPi / 3.0));
  }
  EXPECT_LE(err[2], 2e-3);
  EXPECT_LT(err[2], err[1]);
  EXPECT_LT(err[1], err[0]);
}

TEST(Locator, FindsContainingTriangle) {
  const TriMesh mesh = triangulate(Curve::ellipse(1.2, 0.8, 90), 0.08);
  const MeshLocator loc(mesh);
  Eigen::Vector3d bary;
  const int t = loc.locate(Vec2(0.1, 0.2), &bary);
  ASSERT_GE(t, 0);
  EXPECT_NEAR(bary.sum(), 1.0, 1e-12);
  EXPECT_GE(bary.minCoeff(), -1e-12);
  EXPECT_EQ(loc.locate(Vec2(5.0, 5.0), &bary), -1);
}
