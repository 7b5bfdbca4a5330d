#pragma once

#include "entropylab/geometry.hpp"

#include <limits>
#include <string>
#include <vector>

namespace elab {

struct Snapshot {
  double t = 0.0;
  double tau = 0.0;
  Curve curve;
  double area = 0.0;
  double length = 0.0;
};

struct FlowTrajectory {
  std::vector<Snapshot> snapshots;
  double a = 0.0;      // τ = a - t
  double T_est = 0.0;  // A₀ / 2π
  double dt = 0.0;     // stepper time step (0 for analytic trajectories)
  long steps = 0;
  bool truncated = false;
  // every snapshot has the same curve; the boundary speed is zero
  bool stationary = false;
  std::string note;

  int size() const { return static_cast<int>(snapshots.size()); }
  const Snapshot& operator[](int k) const { return snapshots[static_cast<size_t>(k)]; }
};

struct FlowOptions {
  double dt_scale = 1.0;
  // τ = a - t; NaN selects a = T_est
  double a = std::numeric_limits<double>::quiet_NaN();
  // stop when the smallest radius of curvature drops below this many mean segment lengths
  double singular_radius_factor = 3.0;
};

// Largest admissible step for a curve: 0.4·(min segment)².
double max_stable_dt(const Curve& c);

// One semi-implicit curve-shortening step followed by uniform arc-length
// redistribution anchored at vertex 0. Rejects dt above max_stable_dt and
// throws NumericalError if the result is not embedded.
Curve csf_step(const Curve& c, double dt);

// Integrates to t₁ = frac·T_est, T_est = A₀/2π. snapshot_count ≥ 2 gives
// uniformly spaced snapshots including t = 0 and t = t₁; 0 records every step.
FlowTrajectory run_flow(const Curve& c0, double frac, int snapshot_count, const FlowOptions& options = {});

// Exact circles R(t) = √(R₀² - 2t) with a = T = R₀²/2.
FlowTrajectory analytic_shrinking_disk_trajectory(double R0, const std::vector<double>& times, int vertices);

// The same curve at every time, τ = a - t.
FlowTrajectory stationary_trajectory(const Curve& c, const std::vector<double>& times, double a);

}  // namespace elab
