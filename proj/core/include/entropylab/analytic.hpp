#pragma once

#include "entropylab/geometry.hpp"

#include <array>
#include <string>
#include <variant>

namespace elab {

// Points of up to three coordinates; unused trailing coordinates are ignored.
using Point3 = std::array<double, 3>;

struct Disk {
  double R = 1.0;
  Vec2 center = Vec2::Zero();
};
// {x₂ < a}
struct HalfPlane {
  double a = 0.0;
};
// {|x_last| < d} in ℝ^dim
struct Slab {
  double d = 1.0;
  int dim = 2;
};
// {|x₁| < π/2, x₂ > -log cos x₁}
struct GrimReaper2D {};
// ℝ^{n-1} × grim reaper region in ℝ^{n+1}; the last two coordinates carry the profile.
struct GrimReaperProduct {
  int n = 1;
};
// {|x̂| ≥ 1, |x₃| ≤ arccosh|x̂|} in ℝ³, bounded by the catenoid.
struct Catenoid3D {};
struct Ball {
  double R = 1.0;
  int dim = 2;
};
struct Ellipse {
  double a = 1.0;
  double b = 1.0;
};

using AnalyticDomain =
    std::variant<Disk, HalfPlane, Slab, GrimReaper2D, GrimReaperProduct, Catenoid3D, Ball, Ellipse>;

int dimension(const AnalyticDomain& d);
std::string variant_name(const AnalyticDomain& d);
// Throws ValidationError on non-positive parameters or unsupported dimensions.
void validate(const AnalyticDomain& d);

bool contains(const AnalyticDomain& d, const Point3& x);
// Mean curvature of the boundary (sum of principal curvatures, outward normal,
// positive for convex regions) at a boundary point.
double boundary_H(const AnalyticDomain& d, const Point3& x);
Point3 boundary_normal(const AnalyticDomain& d, const Point3& x);

// Polyline approximation of a bounded planar domain (Disk, Ellipse, Ball with dim 2).
Curve boundary_curve(const AnalyticDomain& d, int vertices);
bool is_bounded_planar(const AnalyticDomain& d);

}  // namespace elab
