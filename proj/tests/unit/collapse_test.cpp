#include "common.hpp"

#include "entropylab/collapse.hpp"
#include "entropylab/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

using namespace elab;

namespace {

CollapseDomain dom(AnalyticDomain d) { return CollapseDomain{d}; }

double gk(const std::function<double(double)>& g, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, a, b, 15, 1e-13);
}

}  // namespace

TEST(BallVolume, DiskInsideBall) {
  EXPECT_NEAR(ball_intersection_volume(dom(Disk{1.0, Vec2::Zero()}), {0, 0, 0}, 2.0).value, kPi, 1e-12);
  EXPECT_NEAR(ball_intersection_volume(CollapseDomain{Curve::circle(1.0, 64)}, {0, 0, 0}, 2.0).value,
              Curve::circle(1.0, 64).signed_area(), 1e-12);
}

TEST(BallVolume, SlabAgainstChordIntegral) {
  // 2∫ min(d, √(r² - x²)) dx over |x| ≤ r
  const double d = 1.0, r = 10.0;
  const double oracle = 2.0 * gk([&](double x) { return std::min(d, std::sqrt(std::max(0.0, r * r - x * x))); }, -r, r);
  EXPECT_NEAR(ball_intersection_volume(dom(Slab{d, 2}), {0, 0, 0}, r).value, oracle, 1e-9 * oracle);
  // ∫_{-1}^{1} 2√(r² - y²) dy
  EXPECT_NEAR(ball_intersection_volume(dom(Slab{d, 2}), {0, 0, 0}, r).value,
              2.0 * std::sqrt(99.0) + 2.0 * r * r * std::asin(1.0 / r), 1e-9 * oracle);
}

TEST(BallVolume, SpatialBallAgainstClosedForm) {
  // unit ball against a ball of radius 1 at distance 1: two caps of height 1/2
  const double cap = kPi * 0.25 * (3.0 - 0.5) / 3.0;
  const VolumeEstimate v = ball_intersection_volume(dom(Ball{1.0, 3}), {1.0, 0.0, 0.0}, 1.0, 1000000, 3);
  EXPECT_NEAR(v.value, 2.0 * cap, 5e-3 * 2.0 * cap);
  EXPECT_GT(v.error, 0.0);
}

TEST(BallVolume, CatenoidFollowsLogGrowth) {
  auto scaled = [](double r) {
    return ball_intersection_volume(dom(Catenoid3D{}), {0, 0, 0}, r).value / (r * r * std::log1p(r));
  };
  const double a = scaled(8.0), b = scaled(16.0);
  EXPECT_NEAR(a / b, 1.0, 0.1);
}

TEST(BallVolume, MonotoneAndScaleInvariant) {
  const Curve c = Curve::ellipse(1.3, 0.6, 300);
  double prev = 0.0;
  for (double r : {0.1, 0.3, 0.7, 1.1, 2.0}) {
    const double v = ball_intersection_volume(CollapseDomain{c}, {0.2, 0.1, 0.0}, r).value;
    EXPECT_GE(v, prev);
    prev = v;
  }
  const RatioScan a = ratio_scan(CollapseDomain{c}, {{0.2, 0.1, 0.0}}, {0.5, 1.0}, {});
  const RatioScan b = ratio_scan(CollapseDomain{c.transformed(4.0, Vec2::Zero())}, {{0.8, 0.4, 0.0}}, {2.0, 4.0}, {});
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(a.rows[i].ratio, b.rows[i].ratio, 1e-12);
}

TEST(BallVolume, RejectsBadInput) {
  EXPECT_THROW(ball_intersection_volume(dom(Slab{1.0, 2}), {0, 0, 0}, -1.0), ValidationError);
  EXPECT_THROW(ball_intersection_volume(dom(Catenoid3D{}), {0, 0, 0}, 2.0, 10), ValidationError);
}

TEST(BetaIntegral, Examples) {
  BetaSpec H{BetaKind::kMeanCurvature};
  EXPECT_EQ(boundary_beta_integral(dom(Slab{1.0, 2}), {0, 0, 0}, 50.0, H), 0.0);
  // sphere of radius ρ inside B_r: ∫H dS = (2/ρ)·4πρ²
  const double rho = 0.7;
  EXPECT_NEAR(boundary_beta_integral(dom(Ball{rho, 3}), {0, 0, 0}, 2.0, H), 8.0 * kPi * rho, 1e-10);
  // unit circle, H = 1: ∫ = 2π
  EXPECT_NEAR(boundary_beta_integral(dom(Disk{1.0, Vec2::Zero()}), {0, 0, 0}, 3.0, H), 2.0 * kPi, 1e-9);
  // grim reaper: H = e^{-x₂} ≤ e^{-(h-r)} inside B_r(0, h), decaying in h
  const double r = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (double h : {3.0, 5.0, 8.0}) {
    // centred on the right branch, x₂ = -log cos x₁
    const double v = boundary_beta_integral(dom(GrimReaper2D{}), {std::acos(std::exp(-h)), h, 0.0}, r, H);
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, std::exp(-(h - r)) * 4.0 * r);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(RatioScan, SlabCollapses) {
  const RatioScan s = ratio_scan(dom(Slab{1.0, 2}), {{0, 0, 0}}, geometric_radii(4.0, 1024.0), {});
  EXPECT_TRUE(s.ratio_monotone);
  EXPECT_TRUE(s.ratio_to_zero);
  EXPECT_TRUE(s.c1_bounded);
  EXPECT_TRUE(s.collapsed_trend);
  for (const auto& row : s.rows) EXPECT_NEAR(row.ratio * row.r, 4.0, 0.05);
  // the μ upper bound follows the ratio down
  EXPECT_LT(s.rows.back().mu_upper, s.rows.front().mu_upper);
}

TEST(RatioScan, GrimReaperSchedule) {
  const std::vector<double> radii = geometric_radii(4.0, 256.0);
  const RatioScan s = ratio_scan(dom(GrimReaperProduct{1}), grim_reaper_schedule(radii, 2), radii,
                                 BetaSpec{BetaKind::kMeanCurvature});
  EXPECT_TRUE(s.ratio_monotone);
  EXPECT_LE(s.rows.back().ratio, 0.05);
  EXPECT_TRUE(s.c1_bounded);
  for (const auto& row : s.rows) EXPECT_LE(row.h_term, 1.0);
}

TEST(RatioScan, BoundedDomainDoesNotCollapse) {
  const RatioScan s = ratio_scan(dom(Disk{1.0, Vec2::Zero()}), {{0, 0, 0}}, {0.25, 0.5, 1.0}, {});
  EXPECT_FALSE(s.collapsed_trend);
  for (const auto& row : s.rows) EXPECT_NEAR(row.ratio, kPi, 1e-12);
}

TEST(RatioScan, SampledRowsAreDeterministic) {
  const std::vector<double> radii{4.0, 8.0};
  ScanOptions o;
  o.budget = 20000;
  o.seed = 99;
  const RatioScan a = ratio_scan(dom(Catenoid3D{}), {{0, 0, 0}}, radii, {}, o);
  const RatioScan b = ratio_scan(dom(Catenoid3D{}), {{0, 0, 0}}, radii, {}, o);
  for (int i = 0; i < 2; ++i) EXPECT_EQ(a.rows[i].V_full, b.rows[i].V_full);
}

TEST(ShrinkingSphere, Examples) {
  EXPECT_NEAR(shrinking_sphere_ratio(2, -0.25, 2.0).value, 24.0, 1e-12);
  EXPECT_NEAR(shrinking_sphere_ratio(2, -0.25, 4.0).value, 4.0 * shrinking_sphere_ratio(2, -0.25, 2.0).value, 1e-10);
  EXPECT_GT(shrinking_sphere_ratio(2, -1e-6, 2.0).value, 1e6);
  for (int n : {1, 2, 3}) {
    const SphereRatio q = shrinking_sphere_ratio(n, -0.25, 8.0, 0.0, true);
    EXPECT_TRUE(q.quadrature);
    EXPECT_NEAR(q.c_n, 0.5 * (n + 1), 0.01 * 0.5 * (n + 1));
  }
  EXPECT_THROW(shrinking_sphere_ratio(2, 0.5, 2.0), ValidationError);
}

TEST(Fits, RecoverPlantedConstants) {
  std::vector<double> r{4, 8, 16, 32, 64}, y, z;
  for (double x : r) {
    y.push_back(3.5 / x);
    z.push_back(6.0 * x * x * std::log1p(x));
  }
  const FitResult a = fit_inverse_r(r, y), b = fit_r2_log(r, z);
  EXPECT_NEAR(a.C, 3.5, 1e-12);
  EXPECT_NEAR(a.r_squared, 1.0, 1e-12);
  EXPECT_NEAR(b.C, 6.0, 1e-12);
}
