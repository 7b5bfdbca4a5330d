#include "common.hpp"

#include "entropylab/analytic.hpp"
#include "entropylab/errors.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace elab;

namespace {

int nearest_vertex(const Curve& c, const Vec2& p) {
  int best = 0;
  for (int i = 1; i < c.size(); ++i)
    if ((c[i] - p).norm() < (c[best] - p).norm()) best = i;
  return best;
}

double circle_curvature_error(int m) {
  const Field k = Curve::circle(2.0, m).curvature();
  return (k.array() - 0.5).abs().maxCoeff();
}

}  // namespace

TEST(Curvature, CircleIsConstant) { EXPECT_LE(circle_curvature_error(256), 1e-3); }

TEST(Curvature, EllipseAtMajorVertex) {
  const Curve c = Curve::ellipse(2.0, 1.0, 512);
  const int i = nearest_vertex(c, Vec2(2.0, 0.0));
  EXPECT_NEAR(c.curvature()[i], 2.0, 0.02);
}

TEST(Curvature, RoundedSquareArcsAndFlats) {
  const double s = 1.0, rho = 0.3;
  const Curve c = Curve::rounded_square(s, rho, 800);
  const Field k = c.curvature();
  const double d = s - rho + rho / std::sqrt(2.0);
  EXPECT_NEAR(k[nearest_vertex(c, Vec2(d, d))], 1.0 / rho, 0.02 / rho);
  EXPECT_NEAR(k[nearest_vertex(c, Vec2(s, 0.0))], 0.0, 1e-6);
  EXPECT_NEAR(k[nearest_vertex(c, Vec2(0.0, -s))], 0.0, 1e-6);
}

TEST(Curvature, SecondOrderUnderRefinement) {
  EXPECT_GE(circle_curvature_error(64) / circle_curvature_error(128), 3.5);
  auto ellipse_error = [](int m) {
    const Curve c = Curve::ellipse(2.0, 1.0, m);
    return std::abs(c.curvature()[nearest_vertex(c, Vec2(2.0, 0.0))] - 2.0);
  };
  EXPECT_GE(ellipse_error(128) / ellipse_error(256), 3.5);
}

TEST(Curvature, GaussBonnetOnRandomStarPolygons) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.4, 1.6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec2> v;
    const int m = 24 + trial;
    for (int i = 0; i < m; ++i) {
      const double th = 2.0 * kPi * i / m, r = U(rng);
      v.emplace_back(r * std::cos(th), r * std::sin(th));
    }
    const Curve c(v);
    ASSERT_TRUE(c.counter_clockwise());
    EXPECT_NEAR(c.curvature().dot(c.dual_lengths()), 2.0 * kPi, 1e-9);
  }
}

TEST(Normals, UnitCircleAxisPoints) {
  const Curve c = Curve::circle(1.0, 64);
  const auto n = c.outward_normals();
  const int e = nearest_vertex(c, Vec2(1.0, 0.0)), s = nearest_vertex(c, Vec2(0.0, -1.0));
  EXPECT_NEAR((n[e] - Vec2(1.0, 0.0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((n[s] - Vec2(0.0, -1.0)).norm(), 0.0, 1e-12);
}

TEST(Normals, FlatBoundary) {
  const Point3 n = boundary_normal(AnalyticDomain{Slab{1.0, 2}}, {3.0, 1.0, 0.0});
  EXPECT_DOUBLE_EQ(n[0], 0.0);
  EXPECT_DOUBLE_EQ(n[1], 1.0);
  const Curve box(std::vector<Vec2>{{-2, -1}, {2, -1}, {2, 1}, {0, 1}, {-2, 1}});
  EXPECT_NEAR((box.outward_normals()[3] - Vec2(0.0, 1.0)).norm(), 0.0, 1e-15);
}

TEST(Normals, UnitLengthAndFlipUnderReversal) {
  const Curve c = Curve::ellipse(1.3, 0.7, 97);
  const Curve r = c.reversed();
  const auto n = c.outward_normals(), nr = r.outward_normals();
  const int m = c.size();
  for (int i = 0; i < m; ++i) {
    EXPECT_NEAR(n[i].norm(), 1.0, 1e-12);
    EXPECT_EQ(nr[m - 1 - i], Vec2(-n[i]));
  }
}

TEST(TangentialGradient, ConstantIsZero) {
  const Curve c = Curve::ellipse(1.2, 0.8, 77);
  EXPECT_EQ(c.tangential_gradient(Field::Constant(c.size(), 3.25)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(TangentialGradient, SineOnUnitCircle) {
  auto err = [](int m) {
    const Curve c = Curve::circle(1.0, m);
    Field f(m), expect(m);
    for (int i = 0; i < m; ++i) {
      const double th = std::atan2(c[i].y(), c[i].x());
      f[i] = std::sin(th);
      expect[i] = std::cos(th);
    }
    return (c.tangential_gradient(f) - expect).cwiseAbs().maxCoeff();
  };
  EXPECT_LE(err(128), 2.0 * std::pow(2.0 * kPi / 128, 2));
  EXPECT_GE(err(64) / err(128), 3.5);
}

TEST(TangentialGradient, FirstCoordinateOnCircle) {
  const double R = 1.7;
  const Curve c = Curve::circle(R, 200);
  Field f(c.size()), expect(c.size());
  for (int i = 0; i < c.size(); ++i) {
    f[i] = c[i].x();
    expect[i] = -c[i].y() / R;
  }
  EXPECT_LE((c.tangential_gradient(f) - expect).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(SecondFundamentalForm, Examples) {
  const Curve circle = Curve::circle(1.0, 256);
  EXPECT_EQ(circle.second_fundamental_quadratic(Field::Zero(256)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE((circle.second_fundamental_quadratic(Field::Ones(256)).array() - 1.0).abs().maxCoeff(), 1e-3);
  const Curve e = Curve::ellipse(2.0, 1.0, 512);
  EXPECT_NEAR(e.second_fundamental_quadratic(Field::Ones(512))[nearest_vertex(e, Vec2(2, 0))], 2.0, 0.02);
}

TEST(Analytic, Queries) {
  EXPECT_NEAR(boundary_H(AnalyticDomain{GrimReaper2D{}}, {0.0, 0.0, 0.0}), 1.0, 1e-14);
  const double z = 0.7;
  EXPECT_NEAR(boundary_H(AnalyticDomain{Catenoid3D{}}, {std::cosh(z), 0.0, z}), 0.0, 1e-12);
  EXPECT_TRUE(contains(AnalyticDomain{Disk{3.0, Vec2::Zero()}}, {1.0, 1.0, 0.0}));
  EXPECT_FALSE(contains(AnalyticDomain{Disk{3.0, Vec2::Zero()}}, {3.0, 1.0, 0.0}));
  EXPECT_TRUE(contains(AnalyticDomain{Slab{1.0, 3}}, {100.0, -50.0, 0.5}));
  EXPECT_THROW(validate(AnalyticDomain{Slab{-1.0, 2}}), ValidationError);
}

TEST(AreaLength, Examples) {
  EXPECT_NEAR(Curve::circle(1.0, 1024).signed_area(), kPi, 1e-4);
  const Vec2 sq[] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Curve unit(std::vector<Vec2>(std::begin(sq), std::end(sq)));
  EXPECT_DOUBLE_EQ(unit.signed_area(), 1.0);
  EXPECT_DOUBLE_EQ(unit.length(), 4.0);
  EXPECT_NEAR(Curve::ellipse(2.0, 1.0, 512).signed_area(), 2.0 * kPi, 1e-3);
}

TEST(Embeddedness, DetectsSelfIntersection) {
  const std::vector<Vec2> bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  const Curve c(bowtie);
  EXPECT_FALSE(c.embedded());
  EXPECT_THROW(c.require_simple_ccw(), ValidationError);
  EXPECT_THROW(Curve::circle(1.0, 32).reversed().require_simple_ccw(), ValidationError);
  EXPECT_NO_THROW(Curve::circle(1.0, 32).require_simple_ccw());
  EXPECT_THROW(Curve(std::vector<Vec2>{{0, 0}, {1, 0}}), ValidationError);
}

TEST(DiskIntersection, ExactCasesAndScaling) {
  const Vec2 sq[] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  const Curve box = Curve::polygon(sq);
  EXPECT_NEAR(disk_intersection_area(box, Vec2::Zero(), 0.5), kPi * 0.25, 1e-12);
  EXPECT_NEAR(disk_intersection_area(box, Vec2::Zero(), 5.0), 4.0, 1e-12);
  // quarter disk at a corner
  EXPECT_NEAR(disk_intersection_area(box, Vec2(1, 1), 0.5), kPi * 0.25 / 4.0, 1e-12);
  const Curve e = Curve::ellipse(1.3, 0.6, 200);
  const double a = disk_intersection_area(e, Vec2(0.4, 0.1), 0.7);
  EXPECT_NEAR(disk_intersection_area(e.transformed(3.0, Vec2(1, -2)), Vec2(3 * 0.4 + 1, 3 * 0.1 - 2), 2.1), 9.0 * a,
              1e-12);
}

TEST(Resample, UniformSpacing) {
  const Curve c = resample_uniform(Curve::ellipse(1.5, 0.5, 2000), 300);
  const auto l = c.segment_lengths();
  const double mean = c.length() / 300;
  for (double x : l) EXPECT_NEAR(x, mean, 1e-3 * mean);
}

TEST(Resample, CoarseInputStaysOnEllipse) {
  const Curve c = resample_uniform(Curve::ellipse(1.5, 0.5, 60), 300);
  for (int i = 0; i < c.size(); ++i) {
    const Vec2 p = c[i];
    EXPECT_NEAR(std::hypot(p.x() / 1.5, p.y() / 0.5), 1.0, 5e-3);
  }
}
