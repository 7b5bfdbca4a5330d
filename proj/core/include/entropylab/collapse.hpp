#pragma once

#include "entropylab/analytic.hpp"
#include "entropylab/functional.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace elab {

// A planar polyline domain or one of the analytic families.
using CollapseDomain = std::variant<Curve, AnalyticDomain>;

int dimension(const CollapseDomain& d);

struct VolumeEstimate {
  double value = 0.0;
  double error = 0.0;  // 0 for exact clipping, quadrature estimate in 2D, replicate spread in 3D
};

// V(Ω ∩ B_r(c)). Polylines: exact clipping. Planar analytic domains: adaptive
// Gauss–Kronrod over vertical chords. Three-dimensional domains: Sobol points
// with random-shift replicates. budget ≥ 1000 is required for every path.
VolumeEstimate ball_intersection_volume(const CollapseDomain& domain, const Point3& center, double r,
                                        long budget = 1000000, std::uint64_t seed = 1);

struct BetaSpec {
  BetaKind kind = BetaKind::kZero;
  double tau = 1.0;    // for kRadial: β = x·ν/2τ
  Field vertex_values; // for kFile on polylines
};

// ∫_{∂Ω ∩ B_r(c)} |β| dS.
double boundary_beta_integral(const CollapseDomain& domain, const Point3& center, double r, const BetaSpec& beta);

struct ScanRow {
  Point3 center{0.0, 0.0, 0.0};
  double r = 0.0;
  double V_half = 0.0;
  double V_full = 0.0;
  double beta_integral = 0.0;
  double c1 = 0.0;      // (V_full + r²·beta_integral) / V_half
  double ratio = 0.0;   // V_full / r^dim
  double mc_error = 0.0;
  double h_term = 0.0;  // r²·beta_integral / V_half
  double mu_upper = 0.0;  // volume-ratio upper bound for μ_β(Ω, r²)
  bool half_empty = false;
};

struct ScanOptions {
  long budget = 1000000;
  std::uint64_t seed = 1;
  double c1_bound = 64.0;
  std::string center_schedule = "fixed";
};

struct RatioScan {
  std::vector<ScanRow> rows;
  int dim = 2;
  bool ratio_monotone = false;  // non-increasing within three error estimates
  bool ratio_to_zero = false;   // last ratio below a tenth of the first
  bool c1_bounded = false;
  bool collapsed_trend = false;
  double c1_bound = 0.0;
  std::string center_schedule;
};

// Rows are evaluated in parallel; each row seeds its sampler from (center, r, seed).
// centers holds one point for every radius or a single point used for all.
RatioScan ratio_scan(const CollapseDomain& domain, const std::vector<Point3>& centers,
                     const std::vector<double>& radii, const BetaSpec& beta, const ScanOptions& options = {});

// Centers (0, …, 0, r²): balls climbing the grim reaper region.
std::vector<Point3> grim_reaper_schedule(const std::vector<double>& radii, int dim);
// r₀·q^k up to r₁ inclusive.
std::vector<double> geometric_radii(double r0, double r1, double q = 2.0);

struct SphereRatio {
  double value = 0.0;
  double closed_form = 0.0;  // -(n+1)r²/(2s)
  double c_n = 0.0;          // value·(-s)/r²
  bool quadrature = false;
};
// r²∫_{∂B_ρ ∩ B_r(x₀)}H dS / V(B_ρ ∩ B_{r/2}(x₀)) for the sphere of radius
// ρ = √(-2ns) in ℝ^{n+1}, x₀ at distance `offset` from its centre. Closed
// form when B_{r/2}(x₀) contains the ball, otherwise one-dimensional quadrature.
SphereRatio shrinking_sphere_ratio(int n, double s, double r, double offset = 0.0, bool force_quadrature = false);

struct FitResult {
  double C = 0.0;
  double r_squared = 0.0;
};
// Least squares y ≈ C g(x) with R² about the mean of y.
FitResult fit_scaled(const std::vector<double>& x, const std::vector<double>& y,
                     const std::function<double(double)>& g);
FitResult fit_inverse_r(const std::vector<double>& r, const std::vector<double>& y);
FitResult fit_r2_log(const std::vector<double>& r, const std::vector<double>& y);

}  // namespace elab
