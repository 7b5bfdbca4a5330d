#include "entropylab/analytic.hpp"

#include "entropylab/constants.hpp"
#include "entropylab/errors.hpp"

#include <cmath>

namespace elab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double norm_prefix(const Point3& x, int k) {
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

void require_grim_reaper_range(double x1) {
  if (!(std::abs(x1) < 0.5 * kPi))
    throw ValidationError("grim reaper query outside |x1| < pi/2");
}

}  // namespace

int dimension(const AnalyticDomain& d) {
  return std::visit(overloaded{
                        [](const Disk&) { return 2; },
                        [](const HalfPlane&) { return 2; },
                        [](const Slab& s) { return s.dim; },
                        [](const GrimReaper2D&) { return 2; },
                        [](const GrimReaperProduct& g) { return g.n + 1; },
                        [](const Catenoid3D&) { return 3; },
                        [](const Ball& b) { return b.dim; },
                        [](const Ellipse&) { return 2; },
                    },
                    d);
}

std::string variant_name(const AnalyticDomain& d) {
  return std::visit(overloaded{
                        [](const Disk&) { return std::string("disk"); },
                        [](const HalfPlane&) { return std::string("half_plane"); },
                        [](const Slab&) { return std::string("slab"); },
                        [](const GrimReaper2D&) { return std::string("grim_reaper_2d"); },
                        [](const GrimReaperProduct&) { return std::string("grim_reaper_product"); },
                        [](const Catenoid3D&) { return std::string("catenoid_3d"); },
                        [](const Ball&) { return std::string("ball"); },
                        [](const Ellipse&) { return std::string("ellipse"); },
                    },
                    d);
}

void validate(const AnalyticDomain& d) {
  std::visit(overloaded{
                 [](const Disk& x) {
                   if (!(x.R > 0)) throw ValidationError("disk radius must be positive");
                 },
                 [](const HalfPlane&) {},
                 [](const Slab& x) {
                   if (!(x.d > 0)) throw ValidationError("slab half-width must be positive");
                   if (x.dim != 2 && x.dim != 3) throw ValidationError("slab dimension must be 2 or 3");
                 },
                 [](const GrimReaper2D&) {},
                 [](const GrimReaperProduct& x) {
                   if (x.n != 1 && x.n != 2) throw ValidationError("grim reaper product needs n = 1 or 2");
                 },
                 [](const Catenoid3D&) {},
                 [](const Ball& x) {
                   if (!(x.R > 0)) throw ValidationError("ball radius must be positive");
                   if (x.dim != 2 && x.dim != 3) throw ValidationError("ball dimension must be 2 or 3");
                 },
                 [](const Ellipse& x) {
                   if (!(x.a > 0 && x.b > 0)) throw ValidationError("ellipse semi-axes must be positive");
                 },
             },
             d);
}

bool contains(const AnalyticDomain& d, const Point3& x) {
  return std::visit(
      overloaded{
          [&](const Disk& s) { return std::hypot(x[0] - s.center.x(), x[1] - s.center.y()) < s.R; },
          [&](const HalfPlane& s) { return x[1] < s.a; },
          [&](const Slab& s) { return std::abs(x[s.dim - 1]) < s.d; },
          [&](const GrimReaper2D&) {
            return std::abs(x[0]) < 0.5 * kPi && x[1] > -std::log(std::cos(x[0]));
          },
          [&](const GrimReaperProduct& g) {
            const double a = x[g.n - 1], b = x[g.n];
            return std::abs(a) < 0.5 * kPi && b > -std::log(std::cos(a));
          },
          [&](const Catenoid3D&) {
            const double r = std::hypot(x[0], x[1]);
            return r >= 1.0 && std::abs(x[2]) <= std::acosh(r);
          },
          [&](const Ball& s) { return norm_prefix(x, s.dim) < s.R; },
          [&](const Ellipse& s) {
            return (x[0] / s.a) * (x[0] / s.a) + (x[1] / s.b) * (x[1] / s.b) < 1.0;
          },
      },
      d);
}

double boundary_H(const AnalyticDomain& d, const Point3& x) {
  return std::visit(overloaded{
                        [&](const Disk& s) { return 1.0 / s.R; },
                        [&](const HalfPlane&) { return 0.0; },
                        [&](const Slab&) { return 0.0; },
                        [&](const GrimReaper2D&) {
                          require_grim_reaper_range(x[0]);
                          return std::cos(x[0]);
                        },
                        [&](const GrimReaperProduct& g) {
                          require_grim_reaper_range(x[g.n - 1]);
                          return std::cos(x[g.n - 1]);
                        },
                        [&](const Catenoid3D&) { return 0.0; },
                        [&](const Ball& s) { return (s.dim - 1) / s.R; },
                        [&](const Ellipse& s) {
                          // κ = ab / (b²x²/a² + a²y²/b²)^{3/2} written with the point on the ellipse
                          const double gx = x[0] / (s.a * s.a), gy = x[1] / (s.b * s.b);
                          const double g = std::hypot(gx, gy);
                          return 1.0 / (s.a * s.a * s.b * s.b * g * g * g);
                        },
                    },
                    d);
}

Point3 boundary_normal(const AnalyticDomain& d, const Point3& x) {
  return std::visit(
      overloaded{
          [&](const Disk& s) {
            const Vec2 v = Vec2(x[0], x[1]) - s.center;
            const Vec2 n = v.normalized();
            return Point3{n.x(), n.y(), 0.0};
          },
          [&](const HalfPlane&) { return Point3{0.0, 1.0, 0.0}; },
          [&](const Slab& s) {
            Point3 n{0.0, 0.0, 0.0};
            n[s.dim - 1] = x[s.dim - 1] >= 0 ? 1.0 : -1.0;
            return n;
          },
          [&](const GrimReaper2D&) {
            require_grim_reaper_range(x[0]);
            return Point3{std::sin(x[0]), -std::cos(x[0]), 0.0};
          },
          [&](const GrimReaperProduct& g) {
            require_grim_reaper_range(x[g.n - 1]);
            Point3 n{0.0, 0.0, 0.0};
            n[g.n - 1] = std::sin(x[g.n - 1]);
            n[g.n] = -std::cos(x[g.n - 1]);
            return n;
          },
          [&](const Catenoid3D&) {
            const double r = std::hypot(x[0], x[1]);
            Point3 n{-x[0] / r, -x[1] / r, std::sinh(x[2])};
            const double l = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
            return Point3{n[0] / l, n[1] / l, n[2] / l};
          },
          [&](const Ball& s) {
            const double r = norm_prefix(x, s.dim);
            Point3 n{0.0, 0.0, 0.0};
            for (int i = 0; i < s.dim; ++i) n[i] = x[i] / r;
            return n;
          },
          [&](const Ellipse& s) {
            const Vec2 g = Vec2(x[0] / (s.a * s.a), x[1] / (s.b * s.b)).normalized();
            return Point3{g.x(), g.y(), 0.0};
          },
      },
      d);
}

bool is_bounded_planar(const AnalyticDomain& d) {
  if (std::holds_alternative<Disk>(d) || std::holds_alternative<Ellipse>(d)) return true;
  if (const auto* b = std::get_if<Ball>(&d)) return b->dim == 2;
  return false;
}

Curve boundary_curve(const AnalyticDomain& d, int vertices) {
  validate(d);
  if (const auto* s = std::get_if<Disk>(&d)) return Curve::circle(s->R, vertices, s->center);
  if (const auto* s = std::get_if<Ellipse>(&d)) return Curve::ellipse(s->a, s->b, vertices);
  if (const auto* s = std::get_if<Ball>(&d); s && s->dim == 2) return Curve::circle(s->R, vertices);
  throw ValidationError("domain '" + variant_name(d) + "' is not a bounded planar region");
}

}  // namespace elab
