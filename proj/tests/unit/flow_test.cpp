#include "common.hpp"

#include "entropylab/errors.hpp"
#include "entropylab/flow.hpp"

#include <gtest/gtest.h>

using namespace elab;

namespace {

double mean_radius(const Curve& c) {
  double s = 0.0;
  for (int i = 0; i < c.size(); ++i) s += c[i].norm();
  return s / c.size();
}

double radius_error_at(double t, int m) {
  const FlowTrajectory tr = run_flow(Curve::circle(1.0, m), 2.0 * t, 2);
  return std::abs(mean_radius(tr.snapshots.back().curve) - std::sqrt(1.0 - 2.0 * tr.snapshots.back().t));
}

}  // namespace

TEST(CsfStep, OneCircleStep) {
  const Curve c0 = Curve::circle(1.0, 512);
  const double dt = max_stable_dt(c0);
  const Curve c = csf_step(c0, dt);
  EXPECT_LE(std::abs(mean_radius(c) - std::sqrt(1.0 - 2.0 * dt)), 1e-8);
  EXPECT_THROW(csf_step(c0, 2.0 * dt), ValidationError);
}

TEST(RunFlow, CircleReachesHalfRadius) {
  const FlowTrajectory tr = run_flow(Curve::circle(1.0, 512), 0.75, 2);
  EXPECT_NEAR(tr.snapshots.back().t, 0.75 * tr.T_est, 1e-12);
  EXPECT_NEAR(mean_radius(tr.snapshots.back().curve), 0.5, 1e-4);
  EXPECT_NEAR(tr.T_est, 0.5, 1e-4);
  EXPECT_GT(tr.snapshots.back().tau, 0.0);
}

TEST(RunFlow, RadiusConvergesUnderRefinement) {
  // doubling the vertex count quarters the step
  EXPECT_GE(radius_error_at(0.2, 64) / radius_error_at(0.2, 128), 3.5);
}

TEST(RunFlow, EllipseRoundsAndKeepsInvariants) {
  const FlowTrajectory tr = run_flow(Curve::ellipse(1.2, 0.8, 256), 0.8, 41);
  ASSERT_EQ(tr.size(), 41);
  double prev_iso = std::numeric_limits<double>::infinity();
  for (int k = 0; k < tr.size(); ++k) {
    const Snapshot& s = tr[k];
    EXPECT_TRUE(s.curve.embedded());
    EXPECT_GT(s.tau, 0.0);
    EXPECT_NEAR(s.area, tr[0].area - 2.0 * kPi * s.t, 1e-4);
    const double iso = s.length * s.length / (4.0 * kPi * s.area);
    EXPECT_LT(iso, prev_iso + 1e-12);
    EXPECT_GE(iso, 1.0);
    prev_iso = iso;
    if (k > 0) {
      EXPECT_GT(s.t, tr[k - 1].t);
      EXPECT_LT(s.area, tr[k - 1].area);
      // area decay rate by finite differences
      EXPECT_NEAR((s.area - tr[k - 1].area) / (s.t - tr[k - 1].t), -2.0 * kPi, 1e-3);
    }
  }
}

TEST(RunFlow, ComparisonWithEnclosingCircle) {
  const FlowTrajectory tr = run_flow(Curve::ellipse(1.2, 0.8, 256), 0.8, 21);
  for (const auto& s : tr.snapshots) {
    const double R = std::sqrt(1.2 * 1.2 - 2.0 * s.t);
    for (const auto& p : s.curve.vertices()) EXPECT_LE(p.norm(), R + 1e-9);
  }
}

TEST(RunFlow, NonConvexCurveStaysEmbedded) {
  std::vector<Vec2> v;
  for (int i = 0; i < 256; ++i) {
    const double th = 2.0 * kPi * i / 256, r = 1.0 + 0.3 * std::cos(2.0 * th);
    v.emplace_back(r * std::cos(th), r * std::sin(th));
  }
  const FlowTrajectory tr = run_flow(resample_uniform(Curve(v), 256), 0.8, 11);
  for (const auto& s : tr.snapshots) EXPECT_TRUE(s.curve.embedded());
}

TEST(RunFlow, RejectsBadInput) {
  EXPECT_THROW(run_flow(Curve::circle(1.0, 64), 1.2, 5), ValidationError);
  EXPECT_THROW(run_flow(Curve::circle(1.0, 64).reversed(), 0.5, 5), ValidationError);
  EXPECT_THROW(csf_step(Curve::circle(1.0, 64), -1.0), ValidationError);
}

TEST(AnalyticDisk, ClosedForm) {
  const FlowTrajectory tr = analytic_shrinking_disk_trajectory(1.0, {0.0, 0.32}, 360);
  EXPECT_NEAR(mean_radius(tr[0].curve), 1.0, 1e-14);
  EXPECT_NEAR(mean_radius(tr[1].curve), 0.6, 1e-14);
  // H·2τ = x·ν with H = 1/R and 2τ = R²
  for (const auto& s : tr.snapshots) {
    const double R = mean_radius(s.curve);
    EXPECT_NEAR(2.0 * s.tau / R, R, 1e-14);
  }
  EXPECT_THROW(analytic_shrinking_disk_trajectory(1.0, {0.0, 0.6}, 64), ValidationError);
}
