#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

namespace elab {

using Vec2 = Eigen::Vector2d;
using Field = Eigen::VectorXd;

struct Box2 {
  Vec2 lo;
  Vec2 hi;
};

// Closed polyline. Vertex i connects to vertex (i+1) mod m. Construction
// checks for at least three vertices and no zero-length segment; embeddedness
// and orientation are separate queries so intermediate curves can be built.
class Curve {
 public:
  Curve() = default;
  explicit Curve(std::vector<Vec2> vertices);

  static Curve circle(double radius, int m, Vec2 center = Vec2::Zero(), double phase = 0.0);
  // Vertices at equal arc length on the ellipse x²/a² + y²/b² = 1, first vertex at (a, 0).
  static Curve ellipse(double a, double b, int m, Vec2 center = Vec2::Zero());
  // Axis-aligned square of half-width s with corners rounded to radius rho.
  static Curve rounded_square(double s, double rho, int m);
  static Curve polygon(std::span<const Vec2> corners);

  int size() const { return static_cast<int>(v_.size()); }
  const Vec2& operator[](int i) const { return v_[static_cast<size_t>(i)]; }
  const std::vector<Vec2>& vertices() const { return v_; }
  int next(int i) const { return i + 1 == size() ? 0 : i + 1; }
  int prev(int i) const { return i == 0 ? size() - 1 : i - 1; }

  double signed_area() const;
  double length() const;
  bool counter_clockwise() const { return signed_area() > 0.0; }
  Curve reversed() const;
  Vec2 centroid() const;
  Box2 bounding_box() const;

  // l_i = |x_{i+1} - x_i|
  std::vector<double> segment_lengths() const;
  double min_segment() const;
  // (l_{i-1} + l_i) / 2, the arc length carried by vertex i
  Field dual_lengths() const;

  // Signed exterior turning angle at each vertex, in (-π, π).
  Field turning_angles() const;
  // Turning angle over dual length. Positive on convex CCW curves.
  Field curvature() const;
  // Unit normals pointing away from the enclosed region of a CCW curve
  // (normalised sum of adjacent edge normals).
  std::vector<Vec2> outward_normals() const;
  std::vector<Vec2> tangents() const;

  // ∂/∂s by three-point centered differences on the nonuniform arc-length grid.
  Field tangential_gradient(const Field& values) const;
  // A(V,V) = κ V² for tangential component V.
  Field second_fundamental_quadratic(const Field& tangential) const;

  bool embedded() const;
  bool contains(const Vec2& p) const;
  double distance(const Vec2& p) const;
  // Closest point on the polyline, segment index and parameter in [0,1].
  Vec2 closest_point(const Vec2& p, int* segment = nullptr, double* param = nullptr) const;

  Curve transformed(double scale, const Vec2& shift) const;

  // Throws ValidationError when the curve is not embedded, not CCW, or too short.
  void require_simple_ccw(int min_vertices = 3) const;

 private:
  std::vector<Vec2> v_;
};

// Resampling to m vertices equally spaced in the arc length of the input
// polygon, placed by periodic cubic Hermite interpolation. Chords of the
// result are equal only up to the resolution of the input. Vertex 0 of the result is the point of the input at
// arc-length offset `anchor` (vertex 0 when anchor = 0).
Curve resample_uniform(const Curve& c, int m, double anchor = 0.0);

// Exact area of the intersection of the enclosed region with the disk B_r(c),
// summed over signed circle-triangle pieces. Scale equivariant.
double disk_intersection_area(const Curve& c, const Vec2& center, double r);
// ∫_{∂Ω ∩ B_r(c)} |g| ds for g linear along each segment with the given vertex values.
double boundary_integral_in_disk(const Curve& c, const Field& vertex_values, const Vec2& center, double r);

// Segment pair test with endpoint-touching counted as intersection.
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

// Intersection of the ray p + s·dir (s of either sign) with segment [a,b];
// returns true and sets s and the segment parameter on hit.
bool line_segment_hit(const Vec2& p, const Vec2& dir, const Vec2& a, const Vec2& b, double* s,
                      double* param);

}  // namespace elab
