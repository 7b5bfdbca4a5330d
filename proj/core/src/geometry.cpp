#include "entropylab/geometry.hpp"

#include "entropylab/constants.hpp"
#include "entropylab/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

namespace elab {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double orient(const Vec2& a, const Vec2& b, const Vec2& c) { return cross(b - a, c - a); }

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

// Signed area of B_r(0) ∩ triangle(0, a, b).
double circle_triangle_area(const Vec2& a, const Vec2& b, double r) {
  auto sector = [r](const Vec2& u, const Vec2& v) { return 0.5 * r * r * std::atan2(cross(u, v), u.dot(v)); };
  if (a.squaredNorm() <= r * r && b.squaredNorm() <= r * r) return 0.5 * cross(a, b);
  const Vec2 d = b - a;
  const double A = d.dot(d), B = a.dot(d), C = a.dot(a) - r * r;
  const double disc = B * B - A * C;
  if (disc <= 0.0 || A <= 0.0) return sector(a, b);
  const double s = std::sqrt(disc);
  const double t1 = (-B - s) / A, t2 = (-B + s) / A;
  if (t2 <= 0.0 || t1 >= 1.0) return sector(a, b);
  const Vec2 p1 = a + std::max(t1, 0.0) * d;
  const Vec2 p2 = a + std::min(t2, 1.0) * d;
  return sector(a, p1) + 0.5 * cross(p1, p2) + sector(p2, b);
}

// Parameter interval of segment a + t(b-a), t in [0,1], inside B_r(0); false when empty.
bool segment_in_disk(const Vec2& a, const Vec2& b, double r, double* t0, double* t1) {
  const Vec2 d = b - a;
  const double A = d.dot(d), B = a.dot(d), C = a.dot(a) - r * r;
  const double disc = B * B - A * C;
  if (disc <= 0.0 || A <= 0.0) return false;
  const double s = std::sqrt(disc);
  *t0 = std::max((-B - s) / A, 0.0);
  *t1 = std::min((-B + s) / A, 1.0);
  return *t1 > *t0;
}

// ∫_{t0}^{t1} |p + (q - p) t| dt
double abs_linear_integral(double p, double q, double t0, double t1) {
  const double v0 = p + (q - p) * t0, v1 = p + (q - p) * t1;
  if ((v0 >= 0) == (v1 >= 0)) return 0.5 * std::abs(v0 + v1) * (t1 - t0);
  const double tz = t0 + (t1 - t0) * v0 / (v0 - v1);
  return 0.5 * std::abs(v0) * (tz - t0) + 0.5 * std::abs(v1) * (t1 - tz);
}

}  // namespace

double disk_intersection_area(const Curve& c, const Vec2& center, double r) {
  if (!(r > 0.0)) throw ValidationError("ball radius must be positive");
  double a = 0.0;
  for (int i = 0; i < c.size(); ++i) a += circle_triangle_area(c[i] - center, c[c.next(i)] - center, r);
  return std::abs(a);
}

double boundary_integral_in_disk(const Curve& c, const Field& g, const Vec2& center, double r) {
  if (!(r > 0.0)) throw ValidationError("ball radius must be positive");
  if (g.size() != c.size()) throw ValidationError("boundary field length does not match the curve");
  double total = 0.0;
  for (int i = 0; i < c.size(); ++i) {
    double t0 = 0.0, t1 = 0.0;
    if (!segment_in_disk(c[i] - center, c[c.next(i)] - center, r, &t0, &t1)) continue;
    total += (c[c.next(i)] - c[i]).norm() * abs_linear_integral(g[i], g[c.next(i)], t0, t1);
  }
  return total;
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
    return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool line_segment_hit(const Vec2& p, const Vec2& dir, const Vec2& a, const Vec2& b, double* s,
                      double* param) {
  const Vec2 e = b - a;
  const double den = cross(dir, e);
  if (std::abs(den) < 1e-300) return false;
  const Vec2 ap = a - p;
  const double lam = cross(ap, e) / den;
  const double mu = cross(ap, dir) / den;
  if (mu < -1e-12 || mu > 1.0 + 1e-12) return false;
  *s = lam;
  *param = std::clamp(mu, 0.0, 1.0);
  return true;
}

Curve::Curve(std::vector<Vec2> vertices) : v_(std::move(vertices)) {
  if (v_.size() < 3) throw ValidationError("curve needs at least 3 vertices");
  for (int i = 0; i < size(); ++i) {
    if (!v_[i].allFinite()) throw ValidationError("curve vertex " + std::to_string(i) + " is not finite");
    if ((v_[next(i)] - v_[i]).norm() <= 0.0)
      throw ValidationError("zero-length segment at curve vertex " + std::to_string(i));
  }
}

Curve Curve::circle(double radius, int m, Vec2 center, double phase) {
  if (!(radius > 0.0)) throw ValidationError("circle radius must be positive");
  std::vector<Vec2> v(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double t = phase + 2.0 * kPi * j / m;
    v[j] = center + radius * Vec2(std::cos(t), std::sin(t));
  }
  return Curve(std::move(v));
}

Curve Curve::ellipse(double a, double b, int m, Vec2 center) {
  if (!(a > 0.0 && b > 0.0)) throw ValidationError("ellipse semi-axes must be positive");
  if (m < 3) throw ValidationError("ellipse needs at least 3 vertices");
  using boost::math::quadrature::gauss;
  auto speed = [&](double t) { return std::hypot(a * std::sin(t), b * std::cos(t)); };
  const int n = std::max(256, 8 * m);
  std::vector<double> grid(n + 1), s(n + 1, 0.0);
  for (int k = 0; k <= n; ++k) grid[k] = 2.0 * kPi * k / n;
  for (int k = 0; k < n; ++k) s[k + 1] = s[k] + gauss<double, 20>::integrate(speed, grid[k], grid[k + 1]);
  const double total = s[n];
  std::vector<Vec2> v(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double target = total * j / m;
    int k = static_cast<int>(std::upper_bound(s.begin(), s.end(), target) - s.begin()) - 1;
    k = std::clamp(k, 0, n - 1);
    double t = grid[k] + (target - s[k]) / (s[k + 1] - s[k]) * (grid[k + 1] - grid[k]);
    for (int it = 0; it < 20; ++it) {
      const double st = s[k] + gauss<double, 20>::integrate(speed, grid[k], t);
      const double dt = (st - target) / speed(t);
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    v[j] = center + Vec2(a * std::cos(t), b * std::sin(t));
  }
  return Curve(std::move(v));
}

Curve Curve::rounded_square(double s, double rho, int m) {
  if (!(s > 0.0 && rho > 0.0 && rho <= s)) throw ValidationError("rounded square needs 0 < rho <= s");
  const double flat = 2.0 * (s - rho);
  const double arc = 0.5 * kPi * rho;
  const double total = 4.0 * (flat + arc);
  std::vector<Vec2> v(static_cast<size_t>(m));
  // start at the middle of the right side, travel CCW
  for (int j = 0; j < m; ++j) {
    double d = total * j / m + 0.5 * flat;  // distance from the bottom end of the right flat
    const int raw = static_cast<int>(d / (flat + arc));
    d -= raw * (flat + arc);
    const int side = raw % 4;
    Vec2 p;
    if (d < flat) {
      p = Vec2(s, -(s - rho) + d);
    } else {
      const double ang = (d - flat) / rho;
      p = Vec2(s - rho, s - rho) + rho * Vec2(std::cos(ang), std::sin(ang));
    }
    // rotate by side·90°
    for (int r = 0; r < side; ++r) p = Vec2(-p.y(), p.x());
    v[j] = p;
  }
  return Curve(std::move(v));
}

Curve Curve::polygon(std::span<const Vec2> corners) {
  return Curve(std::vector<Vec2>(corners.begin(), corners.end()));
}

double Curve::signed_area() const {
  double a = 0.0;
  for (int i = 0; i < size(); ++i) a += cross(v_[i], v_[next(i)]);
  return 0.5 * a;
}

double Curve::length() const {
  double l = 0.0;
  for (int i = 0; i < size(); ++i) l += (v_[next(i)] - v_[i]).norm();
  return l;
}

Curve Curve::reversed() const {
  std::vector<Vec2> r(v_.rbegin(), v_.rend());
  return Curve(std::move(r));
}

Vec2 Curve::centroid() const {
  Vec2 c = Vec2::Zero();
  double a = 0.0;
  for (int i = 0; i < size(); ++i) {
    const double w = cross(v_[i], v_[next(i)]);
    a += w;
    c += w * (v_[i] + v_[next(i)]);
  }
  return c / (3.0 * a);
}

Box2 Curve::bounding_box() const {
  Box2 b{v_[0], v_[0]};
  for (const auto& p : v_) {
    b.lo = b.lo.cwiseMin(p);
    b.hi = b.hi.cwiseMax(p);
  }
  return b;
}

std::vector<double> Curve::segment_lengths() const {
  std::vector<double> l(v_.size());
  for (int i = 0; i < size(); ++i) l[i] = (v_[next(i)] - v_[i]).norm();
  return l;
}

double Curve::min_segment() const {
  const auto l = segment_lengths();
  return *std::min_element(l.begin(), l.end());
}

Field Curve::dual_lengths() const {
  const auto l = segment_lengths();
  Field d(size());
  for (int i = 0; i < size(); ++i) d[i] = 0.5 * (l[prev(i)] + l[i]);
  return d;
}

Field Curve::turning_angles() const {
  Field th(size());
  for (int i = 0; i < size(); ++i) {
    const Vec2 e0 = v_[i] - v_[prev(i)];
    const Vec2 e1 = v_[next(i)] - v_[i];
    th[i] = std::atan2(cross(e0, e1), e0.dot(e1));
  }
  return th;
}

Field Curve::curvature() const { return turning_angles().cwiseQuotient(dual_lengths()); }

std::vector<Vec2> Curve::outward_normals() const {
  std::vector<Vec2> en(v_.size());
  for (int i = 0; i < size(); ++i) {
    const Vec2 e = v_[next(i)] - v_[i];
    en[i] = Vec2(e.y(), -e.x()) / e.norm();
  }
  std::vector<Vec2> n(v_.size());
  for (int i = 0; i < size(); ++i) {
    const Vec2 s = en[prev(i)] + en[i];
    const double l = s.norm();
    if (l < 1e-14) throw ValidationError("curve folds back on itself at vertex " + std::to_string(i));
    n[i] = s / l;
  }
  return n;
}

std::vector<Vec2> Curve::tangents() const {
  auto n = outward_normals();
  for (auto& x : n) x = Vec2(-x.y(), x.x());
  return n;
}

Field Curve::tangential_gradient(const Field& values) const {
  if (size() < 3) throw ValidationError("tangential gradient needs at least 3 vertices");
  if (values.size() != size()) throw ValidationError("boundary field length does not match the curve");
  const auto l = segment_lengths();
  Field g(size());
  for (int i = 0; i < size(); ++i) {
    const double lp = l[i], lm = l[prev(i)];
    const double dp = values[next(i)] - values[i], dm = values[i] - values[prev(i)];
    g[i] = (lm * lm * dp + lp * lp * dm) / (lp * lm * (lp + lm));
  }
  return g;
}

Field Curve::second_fundamental_quadratic(const Field& tangential) const {
  if (tangential.size() != size()) throw ValidationError("boundary field length does not match the curve");
  return curvature().cwiseProduct(tangential.cwiseAbs2());
}

bool Curve::embedded() const {
  const int m = size();
  const auto l = segment_lengths();
  const auto th = turning_angles();
  for (int i = 0; i < m; ++i)
    if (std::abs(th[i]) > kPi - 1e-9) return false;
  if (m <= 3) return true;

  // uniform grid broad phase
  const Box2 bb = bounding_box();
  double mean = 0.0;
  for (double x : l) mean += x;
  mean /= m;
  const Vec2 ext = bb.hi - bb.lo;
  const double cell = std::max({mean, 1e-12 * std::max(ext.x(), ext.y()), 1e-300});
  const long nx = std::max(1L, std::min(4096L, static_cast<long>(ext.x() / cell) + 1));
  const long ny = std::max(1L, std::min(4096L, static_cast<long>(ext.y() / cell) + 1));
  const double cx = ext.x() / nx + 1e-300, cy = ext.y() / ny + 1e-300;
  std::unordered_map<long, std::vector<int>> grid;
  grid.reserve(static_cast<size_t>(2 * m));
  auto cell_of = [&](double x, double lo, double c, long n) {
    return std::clamp(static_cast<long>((x - lo) / c), 0L, n - 1);
  };
  for (int i = 0; i < m; ++i) {
    const Vec2& a = v_[i];
    const Vec2& b = v_[next(i)];
    const long x0 = cell_of(std::min(a.x(), b.x()), bb.lo.x(), cx, nx);
    const long x1 = cell_of(std::max(a.x(), b.x()), bb.lo.x(), cx, nx);
    const long y0 = cell_of(std::min(a.y(), b.y()), bb.lo.y(), cy, ny);
    const long y1 = cell_of(std::max(a.y(), b.y()), bb.lo.y(), cy, ny);
    for (long gx = x0; gx <= x1; ++gx)
      for (long gy = y0; gy <= y1; ++gy) grid[gx * ny + gy].push_back(i);
  }
  for (const auto& [key, segs] : grid) {
    for (size_t p = 0; p < segs.size(); ++p) {
      for (size_t q = p + 1; q < segs.size(); ++q) {
        const int i = segs[p], j = segs[q];
        if (j == next(i) || i == next(j)) continue;
        if (segments_intersect(v_[i], v_[next(i)], v_[j], v_[next(j)])) return false;
      }
    }
  }
  return true;
}

bool Curve::contains(const Vec2& p) const {
  bool in = false;
  for (int i = 0, j = size() - 1; i < size(); j = i++) {
    const Vec2& a = v_[i];
    const Vec2& b = v_[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < x) in = !in;
    }
  }
  return in;
}

Vec2 Curve::closest_point(const Vec2& p, int* segment, double* param) const {
  double best = std::numeric_limits<double>::infinity();
  Vec2 bp = v_[0];
  for (int i = 0; i < size(); ++i) {
    const Vec2& a = v_[i];
    const Vec2 e = v_[next(i)] - a;
    const double t = std::clamp((p - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
    const Vec2 q = a + t * e;
    const double d = (p - q).squaredNorm();
    if (d < best) {
      best = d;
      bp = q;
      if (segment) *segment = i;
      if (param) *param = t;
    }
  }
  return bp;
}

double Curve::distance(const Vec2& p) const { return (closest_point(p) - p).norm(); }

Curve Curve::transformed(double scale, const Vec2& shift) const {
  std::vector<Vec2> v(v_.size());
  for (size_t i = 0; i < v.size(); ++i) v[i] = scale * v_[i] + shift;
  return Curve(std::move(v));
}

void Curve::require_simple_ccw(int min_vertices) const {
  if (size() < min_vertices)
    throw ValidationError("curve has " + std::to_string(size()) + " vertices, need at least " +
                          std::to_string(min_vertices));
  if (!embedded()) throw ValidationError("curve is not embedded (segments intersect)");
  if (!counter_clockwise()) throw ValidationError("curve must be counter-clockwise");
}

Curve resample_uniform(const Curve& c, int m, double anchor) {
  const int n = c.size();
  const auto l = c.segment_lengths();
  std::vector<double> s(static_cast<size_t>(n + 1), 0.0);
  for (int i = 0; i < n; ++i) s[i + 1] = s[i] + l[i];
  const double total = s[n];
  std::vector<Vec2> tan(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double lp = l[i], lm = l[c.prev(i)];
    tan[i] = (lm * lm * (c[c.next(i)] - c[i]) + lp * lp * (c[i] - c[c.prev(i)])) / (lp * lm * (lp + lm));
  }
  std::vector<Vec2> out(static_cast<size_t>(m));
  int j = 0;
  anchor = std::fmod(anchor, total);
  if (anchor < 0) anchor += total;
  // targets wrap around once when anchored away from vertex 0
  std::vector<double> targets(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) targets[i] = std::fmod(anchor + total * i / m, total);
  for (int i = 0; i < m; ++i) {
    const double st = targets[i];
    if (i == 0 || st < targets[i - 1]) j = 0;
    while (j + 1 < n && s[j + 1] <= st) ++j;
    const double h = l[j];
    const double t = (st - s[j]) / h;
    const Vec2& p0 = c[j];
    const Vec2& p1 = c[c.next(j)];
    const Vec2 m0 = tan[j] * h, m1 = tan[c.next(j)] * h;
    const double t2 = t * t, t3 = t2 * t;
    out[i] = (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1;
  }
  return Curve(std::move(out));
}

}  // namespace elab
