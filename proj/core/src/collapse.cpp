#include "entropylab/collapse.hpp"

#include "entropylab/bounds.hpp"
#include "entropylab/constants.hpp"
#include "entropylab/errors.hpp"
#include "entropylab/parallel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/sobol.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>

namespace elab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class F>
double gk(F f, double a, double b, double* err = nullptr) {
  if (!(b > a)) return 0.0;
  double e = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13, &e);
  if (err) *err += e;
  return v;
}

// Vertical section {y : (x, y) ∈ Ω} of a planar analytic domain.
bool section(const AnalyticDomain& d, double x, double* lo, double* hi) {
  return std::visit(overloaded{
                        [&](const Disk& s) {
                          const double q = s.R * s.R - (x - s.center.x()) * (x - s.center.x());
                          if (q <= 0.0) return false;
                          *lo = s.center.y() - std::sqrt(q);
                          *hi = s.center.y() + std::sqrt(q);
                          return true;
                        },
                        [&](const Ball& s) {
                          const double q = s.R * s.R - x * x;
                          if (q <= 0.0) return false;
                          *lo = -std::sqrt(q);
                          *hi = std::sqrt(q);
                          return true;
                        },
                        [&](const Ellipse& s) {
                          const double q = 1.0 - (x / s.a) * (x / s.a);
                          if (q <= 0.0) return false;
                          *lo = -s.b * std::sqrt(q);
                          *hi = s.b * std::sqrt(q);
                          return true;
                        },
                        [&](const HalfPlane& s) {
                          *lo = -kInf;
                          *hi = s.a;
                          return true;
                        },
                        [&](const Slab& s) {
                          *lo = -s.d;
                          *hi = s.d;
                          return true;
                        },
                        [&](const GrimReaper2D&) {
                          if (!(std::abs(x) < 0.5 * kPi)) return false;
                          *lo = -std::log(std::cos(x));
                          *hi = kInf;
                          return true;
                        },
                        [&](const GrimReaperProduct&) {
                          if (!(std::abs(x) < 0.5 * kPi)) return false;
                          *lo = -std::log(std::cos(x));
                          *hi = kInf;
                          return true;
                        },
                        [&](const Catenoid3D&) -> bool { throw ValidationError("catenoid is not planar"); },
                    },
                    d);
}

// x-extent of the domain, used as quadrature breakpoints
std::vector<double> x_breaks(const AnalyticDomain& d) {
  return std::visit(overloaded{
                        [](const Disk& s) { return std::vector<double>{s.center.x() - s.R, s.center.x() + s.R}; },
                        [](const Ball& s) { return std::vector<double>{-s.R, s.R}; },
                        [](const Ellipse& s) { return std::vector<double>{-s.a, s.a}; },
                        [](const GrimReaper2D&) { return std::vector<double>{-0.5 * kPi, 0.5 * kPi}; },
                        [](const GrimReaperProduct&) { return std::vector<double>{-0.5 * kPi, 0.5 * kPi}; },
                        [](const auto&) { return std::vector<double>{}; },
                    },
                    d);
}

VolumeEstimate planar_area(const AnalyticDomain& d, const Point3& c, double r) {
  const double cx = c[0], cy = c[1];
  auto chord = [&](double x) {
    const double q = r * r - (x - cx) * (x - cx);
    if (q <= 0.0) return 0.0;
    double lo = 0.0, hi = 0.0;
    if (!section(d, x, &lo, &hi)) return 0.0;
    const double h = std::sqrt(q);
    return std::max(0.0, std::min(hi, cy + h) - std::max(lo, cy - h));
  };
  std::vector<double> br{cx - r, cx + r};
  for (double b : x_breaks(d))
    if (b > cx - r && b < cx + r) br.push_back(b);
  std::sort(br.begin(), br.end());
  VolumeEstimate v;
  for (size_t i = 0; i + 1 < br.size(); ++i) v.value += gk(chord, br[i], br[i + 1], &v.error);
  return v;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t bits(double v) {
  std::uint64_t b = 0;
  std::memcpy(&b, &v, sizeof b);
  return b;
}

VolumeEstimate sampled_volume(const AnalyticDomain& d, const Point3& c, double r, long budget, std::uint64_t seed) {
  constexpr int kReplicates = 16;
  const long n = budget / kReplicates;
  std::vector<std::array<double, 3>> pts(static_cast<size_t>(n));
  boost::random::sobol qrng(3);
  const double span = static_cast<double>(qrng.max()) - static_cast<double>(qrng.min()) + 1.0;
  for (long i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k) pts[i][k] = (static_cast<double>(qrng()) - static_cast<double>(qrng.min())) / span;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> est(kReplicates);
  for (int rep = 0; rep < kReplicates; ++rep) {
    const double sh[3] = {unit(rng), unit(rng), unit(rng)};
    long hit = 0;
    for (long i = 0; i < n; ++i) {
      Point3 p{};
      double q = 0.0;
      for (int k = 0; k < 3; ++k) {
        double u = pts[i][k] + sh[k];
        if (u >= 1.0) u -= 1.0;
        const double z = r * (2.0 * u - 1.0);
        q += z * z;
        p[k] = c[k] + z;
      }
      if (q <= r * r && contains(d, p)) ++hit;
    }
    est[rep] = 8.0 * r * r * r * static_cast<double>(hit) / static_cast<double>(n);
  }
  VolumeEstimate v;
  for (double e : est) v.value += e;
  v.value /= kReplicates;
  double var = 0.0;
  for (double e : est) var += (e - v.value) * (e - v.value);
  var /= (kReplicates - 1);
  v.error = std::sqrt(var / kReplicates);
  return v;
}

// Parametrised piece of a planar boundary.
struct Piece {
  double p0, p1;
  std::function<Vec2(double)> point;
  std::function<double(double)> speed;
  std::function<double(double)> H;
  std::function<Vec2(double)> normal;
};

// Grim reaper branch parametrised by s = √y, y the height; side = ±1.
Piece grim_reaper_branch(double side, double s0, double s1) {
  auto xof = [side](double s) { return side * std::acos(std::exp(-s * s)); };
  // dy/ds = 2s, dx/dy = 1/√(e^{2y} - 1)
  auto speed = [](double s) {
    if (s < 1e-150) return std::sqrt(2.0);
    const double y = s * s;
    const double em = std::expm1(2.0 * y);
    return 2.0 * s * std::sqrt(1.0 + 1.0 / em);
  };
  return Piece{s0,
               s1,
               [xof](double s) { return Vec2(xof(s), s * s); },
               speed,
               [](double s) { return std::exp(-s * s); },
               [xof](double s) {
                 const double x = xof(s);
                 return Vec2(std::sin(x), -std::cos(x));
               }};
}

std::vector<Piece> planar_pieces(const AnalyticDomain& d, const Vec2& c, double r) {
  std::vector<Piece> out;
  auto line = [&](double y, double ny) {
    out.push_back(Piece{c.x() - r, c.x() + r, [y](double p) { return Vec2(p, y); }, [](double) { return 1.0; },
                        [](double) { return 0.0; }, [ny](double) { return Vec2(0.0, ny); }});
  };
  auto circle = [&](const Vec2& o, double R) {
    out.push_back(Piece{0.0, 2.0 * kPi, [o, R](double p) { return Vec2(o + R * Vec2(std::cos(p), std::sin(p))); },
                        [R](double) { return R; }, [R](double) { return 1.0 / R; },
                        [](double p) { return Vec2(std::cos(p), std::sin(p)); }});
  };
  std::visit(overloaded{
                 [&](const Disk& s) { circle(s.center, s.R); },
                 [&](const Ball& s) { circle(Vec2::Zero(), s.R); },
                 [&](const Ellipse& s) {
                   const double a = s.a, b = s.b;
                   out.push_back(Piece{0.0, 2.0 * kPi,
                                       [a, b](double p) { return Vec2(a * std::cos(p), b * std::sin(p)); },
                                       [a, b](double p) { return std::hypot(a * std::sin(p), b * std::cos(p)); },
                                       [a, b](double p) {
                                         const double q = std::hypot(a * std::sin(p), b * std::cos(p));
                                         return a * b / (q * q * q);
                                       },
                                       [a, b](double p) {
                                         return Vec2(b * std::cos(p), a * std::sin(p)).normalized();
                                       }});
                 },
                 [&](const HalfPlane& s) { line(s.a, 1.0); },
                 [&](const Slab& s) {
                   line(s.d, 1.0);
                   line(-s.d, -1.0);
                 },
                 [&](const GrimReaper2D&) {
                   const double y1 = c.y() + r;
                   if (y1 <= 0.0) return;
                   const double s0 = std::sqrt(std::max(0.0, c.y() - r)), s1 = std::sqrt(y1);
                   out.push_back(grim_reaper_branch(1.0, s0, s1));
                   out.push_back(grim_reaper_branch(-1.0, s0, s1));
                 },
                 [&](const GrimReaperProduct&) {
                   const double y1 = c.y() + r;
                   if (y1 <= 0.0) return;
                   const double s0 = std::sqrt(std::max(0.0, c.y() - r)), s1 = std::sqrt(y1);
                   out.push_back(grim_reaper_branch(1.0, s0, s1));
                   out.push_back(grim_reaper_branch(-1.0, s0, s1));
                 },
                 [&](const Catenoid3D&) { throw ValidationError("catenoid is not planar"); },
             },
             d);
  return out;
}

// Parameter intervals of a piece whose points lie in the disk B_r(c).
std::vector<std::pair<double, double>> inside_intervals(const Piece& pc, const Vec2& c, double r) {
  constexpr int kSamples = 4096;
  auto in = [&](double p) { return (pc.point(p) - c).squaredNorm() <= r * r; };
  auto cross = [&](double a, double b) {
    const bool ia = in(a);
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (a + b);
      if (in(mid) == ia)
        a = mid;
      else
        b = mid;
    }
    return 0.5 * (a + b);
  };
  std::vector<std::pair<double, double>> out;
  double prev = pc.p0;
  bool pin = in(prev);
  double start = pin ? pc.p0 : 0.0;
  for (int i = 1; i <= kSamples; ++i) {
    const double p = pc.p0 + (pc.p1 - pc.p0) * i / kSamples;
    const bool pi = in(p);
    if (pi != pin) {
      const double x = cross(prev, p);
      if (pi)
        start = x;
      else
        out.emplace_back(start, x);
    }
    prev = p;
    pin = pi;
  }
  if (pin) out.emplace_back(start, pc.p1);
  return out;
}

double planar_beta_integral(const AnalyticDomain& d, const Vec2& c, double r, const BetaSpec& beta) {
  if (beta.kind == BetaKind::kZero) return 0.0;
  if (beta.kind == BetaKind::kFile) throw ValidationError("file boundary data needs a polyline domain");
  if (beta.kind == BetaKind::kRadial && !(beta.tau > 0.0)) throw ValidationError("tau must be positive");
  double total = 0.0;
  for (const Piece& pc : planar_pieces(d, c, r)) {
    auto g = [&](double p) {
      const double b = beta.kind == BetaKind::kMeanCurvature ? pc.H(p)
                                                             : pc.point(p).dot(pc.normal(p)) / (2.0 * beta.tau);
      return std::abs(b) * pc.speed(p);
    };
    for (const auto& [a, b] : inside_intervals(pc, c, r)) total += gk(g, a, b);
  }
  return total;
}

double spatial_beta_integral(const AnalyticDomain& d, const Point3& c, double r, const BetaSpec& beta) {
  if (beta.kind == BetaKind::kZero) return 0.0;
  if (beta.kind != BetaKind::kMeanCurvature)
    throw ValidationError("three-dimensional surfaces support only zero or mean-curvature boundary data");
  return std::visit(overloaded{
                        [&](const Ball& s) {
                          const double D = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
                          const double R = s.R;
                          double area = 0.0;
                          if (D + R <= r) {
                            area = 4.0 * kPi * R * R;
                          } else if (D - R >= r || R - D >= r) {
                            area = 0.0;
                          } else {
                            const double ct = (R * R + D * D - r * r) / (2.0 * R * D);
                            area = 2.0 * kPi * R * R * (1.0 - std::clamp(ct, -1.0, 1.0));
                          }
                          return 2.0 / R * area;
                        },
                        [&](const GrimReaperProduct&) {
                          // H dA over ℝ × profile: profile integral times the chord in the free direction
                          const Vec2 cp(c[1], c[2]);
                          double total = 0.0;
                          for (const Piece& pc : planar_pieces(GrimReaper2D{}, cp, r)) {
                            auto g = [&](double p) {
                              const double q = r * r - (pc.point(p) - cp).squaredNorm();
                              return q > 0.0 ? pc.H(p) * pc.speed(p) * 2.0 * std::sqrt(q) : 0.0;
                            };
                            for (const auto& [a, b] : inside_intervals(pc, cp, r)) total += gk(g, a, b);
                          }
                          return total;
                        },
                        [&](const auto&) { return 0.0; },  // slab and catenoid: H = 0
                    },
                    d);
}

Field curve_beta(const Curve& c, const BetaSpec& beta) {
  switch (beta.kind) {
    case BetaKind::kZero:
      return Field::Zero(c.size());
    case BetaKind::kMeanCurvature:
      return c.curvature();
    case BetaKind::kRadial: {
      if (!(beta.tau > 0.0)) throw ValidationError("tau must be positive");
      const auto n = c.outward_normals();
      Field b(c.size());
      for (int i = 0; i < c.size(); ++i) b[i] = c[i].dot(n[i]) / (2.0 * beta.tau);
      return b;
    }
    case BetaKind::kFile:
      if (beta.vertex_values.size() != c.size()) throw ValidationError("boundary data length does not match the curve");
      return beta.vertex_values;
  }
  return Field::Zero(c.size());
}

}  // namespace

int dimension(const CollapseDomain& d) {
  if (std::holds_alternative<Curve>(d)) return 2;
  return dimension(std::get<AnalyticDomain>(d));
}

VolumeEstimate ball_intersection_volume(const CollapseDomain& domain, const Point3& c, double r, long budget,
                                        std::uint64_t seed) {
  if (!(r > 0.0)) throw ValidationError("ball radius must be positive");
  if (budget < 1000) throw ValidationError("sampling budget must be at least 1000");
  if (const Curve* cv = std::get_if<Curve>(&domain)) return {disk_intersection_area(*cv, Vec2(c[0], c[1]), r), 0.0};
  const AnalyticDomain& d = std::get<AnalyticDomain>(domain);
  validate(d);
  if (dimension(d) == 2) return planar_area(d, c, r);
  return sampled_volume(d, c, r, budget, seed);
}

double boundary_beta_integral(const CollapseDomain& domain, const Point3& c, double r, const BetaSpec& beta) {
  if (!(r > 0.0)) throw ValidationError("ball radius must be positive");
  if (const Curve* cv = std::get_if<Curve>(&domain))
    return boundary_integral_in_disk(*cv, curve_beta(*cv, beta), Vec2(c[0], c[1]), r);
  const AnalyticDomain& d = std::get<AnalyticDomain>(domain);
  validate(d);
  if (dimension(d) == 2) return planar_beta_integral(d, Vec2(c[0], c[1]), r, beta);
  return spatial_beta_integral(d, c, r, beta);
}

RatioScan ratio_scan(const CollapseDomain& domain, const std::vector<Point3>& centers,
                     const std::vector<double>& radii, const BetaSpec& beta, const ScanOptions& opt) {
  if (radii.empty() || centers.empty()) throw ValidationError("scan needs at least one center and one radius");
  if (centers.size() != 1 && centers.size() != radii.size())
    throw ValidationError("centers must hold one point or one point per radius");
  RatioScan scan;
  scan.dim = dimension(domain);
  scan.c1_bound = opt.c1_bound;
  scan.center_schedule = opt.center_schedule;
  scan.rows.resize(radii.size());
  parallel_for(static_cast<int>(radii.size()), [&](int i) {
    ScanRow& row = scan.rows[static_cast<size_t>(i)];
    row.center = centers.size() == 1 ? centers[0] : centers[static_cast<size_t>(i)];
    row.r = radii[static_cast<size_t>(i)];
    std::uint64_t h = splitmix(opt.seed);
    for (double v : row.center) h = splitmix(h ^ bits(v));
    h = splitmix(h ^ bits(row.r));
    const VolumeEstimate full = ball_intersection_volume(domain, row.center, row.r, opt.budget, h);
    const VolumeEstimate half = ball_intersection_volume(domain, row.center, 0.5 * row.r, opt.budget, splitmix(h));
    row.V_full = full.value;
    row.V_half = half.value;
    row.mc_error = std::max(full.error, half.error);
    row.beta_integral = boundary_beta_integral(domain, row.center, row.r, beta);
    row.ratio = row.V_full / std::pow(row.r, scan.dim);
    row.half_empty = !(row.V_half > 0.0);
    if (row.half_empty) {
      row.c1 = std::numeric_limits<double>::infinity();
      row.h_term = std::numeric_limits<double>::infinity();
      row.mu_upper = std::numeric_limits<double>::quiet_NaN();
    } else {
      row.c1 = (row.V_full + row.r * row.r * row.beta_integral) / row.V_half;
      row.h_term = row.r * row.r * row.beta_integral / row.V_half;
      row.mu_upper =
          volume_ratio_upper_bound(row.V_full, row.V_half, row.beta_integral, row.r, AmbientDimension{scan.dim}).value;
    }
  });

  scan.ratio_monotone = true;
  scan.c1_bounded = true;
  for (size_t i = 0; i < scan.rows.size(); ++i) {
    const ScanRow& r = scan.rows[i];
    if (!(r.c1 <= opt.c1_bound)) scan.c1_bounded = false;
    if (i > 0) {
      const ScanRow& p = scan.rows[i - 1];
      const double tol = 3.0 * (r.mc_error / std::pow(r.r, scan.dim) + p.mc_error / std::pow(p.r, scan.dim));
      if (r.ratio > p.ratio + tol) scan.ratio_monotone = false;
    }
  }
  scan.ratio_to_zero = scan.rows.size() > 1 && scan.rows.back().ratio < 0.1 * scan.rows.front().ratio;
  scan.collapsed_trend = scan.ratio_monotone && scan.ratio_to_zero && scan.c1_bounded;
  return scan;
}

std::vector<Point3> grim_reaper_schedule(const std::vector<double>& radii, int dim) {
  if (dim != 2 && dim != 3) throw ValidationError("grim reaper schedule needs dimension 2 or 3");
  std::vector<Point3> out;
  for (double r : radii) {
    Point3 p{0.0, 0.0, 0.0};
    p[dim - 1] = r * r;
    out.push_back(p);
  }
  return out;
}

std::vector<double> geometric_radii(double r0, double r1, double q) {
  if (!(r0 > 0.0) || !(r1 >= r0) || !(q > 1.0)) throw ValidationError("geometric radii need 0 < r0 <= r1 and q > 1");
  std::vector<double> out;
  for (double r = r0; r <= r1 * (1.0 + 1e-12); r *= q) out.push_back(r);
  return out;
}

SphereRatio shrinking_sphere_ratio(int n, double s, double r, double offset, bool force_quadrature) {
  if (n < 1) throw ValidationError("n must be at least 1");
  if (!(s < 0.0)) throw ValidationError("s must be negative");
  if (!(r >= 1.0)) throw ValidationError("r must be at least 1");
  if (!(offset >= 0.0)) throw ValidationError("offset must be non-negative");
  const double rho = std::sqrt(-2.0 * n * s);
  SphereRatio out;
  out.closed_form = -(n + 1) * r * r / (2.0 * s);
  const double half = 0.5 * r;
  if (!force_quadrature && offset + rho <= half) {
    out.value = n * (n + 1) * r * r / (rho * rho);
  } else {
    out.quadrature = true;
    const double omega_n = std::pow(kPi, 0.5 * n) / boost::math::tgamma(0.5 * n + 1.0);
    const double sphere_nm1 = 2.0 * std::pow(kPi, 0.5 * n) / boost::math::tgamma(0.5 * n);
    auto slice = [&](double x) {
      const double a2 = rho * rho - x * x, b2 = half * half - (x - offset) * (x - offset);
      const double m2 = std::min(a2, b2);
      return m2 > 0.0 ? omega_n * std::pow(m2, 0.5 * n) : 0.0;
    };
    double V = 0.0;
    const double lo = std::max(-rho, offset - half), hi = std::min(rho, offset + half);
    std::vector<double> br{lo, hi};
    if (offset > 0.0) {
      // the two spheres' sections cross where a = b
      const double xc = (rho * rho - half * half + offset * offset) / (2.0 * offset);
      if (xc > lo && xc < hi) br.push_back(xc);
    }
    std::sort(br.begin(), br.end());
    for (size_t i = 0; i + 1 < br.size(); ++i) V += gk(slice, br[i], br[i + 1]);
    if (!(V > 0.0)) throw ValidationError("empty half ball");

    double theta0 = kPi;
    if (offset > 0.0) {
      const double ct = (rho * rho + offset * offset - r * r) / (2.0 * rho * offset);
      theta0 = ct >= 1.0 ? 0.0 : ct <= -1.0 ? kPi : std::acos(ct);
    } else if (rho > r) {
      theta0 = 0.0;
    }
    auto dS = [&](double th) { return sphere_nm1 * std::pow(rho * std::sin(th), n - 1) * rho; };
    const double area = gk(dS, 0.0, theta0);
    out.value = r * r * (n / rho) * area / V;
  }
  out.c_n = out.value * (-s) / (r * r);
  return out;
}

FitResult fit_scaled(const std::vector<double>& x, const std::vector<double>& y, const std::function<double(double)>& g) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("fit needs at least two paired samples");
  double gg = 0.0, gy = 0.0, mean = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double gi = g(x[i]);
    gg += gi * gi;
    gy += gi * y[i];
    mean += y[i];
  }
  mean /= static_cast<double>(y.size());
  FitResult f;
  f.C = gy / gg;
  double ss_res = 0.0, ss_tot = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - f.C * g(x[i]);
    ss_res += e * e;
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  return f;
}

FitResult fit_inverse_r(const std::vector<double>& r, const std::vector<double>& y) {
  return fit_scaled(r, y, [](double v) { return 1.0 / v; });
}

FitResult fit_r2_log(const std::vector<double>& r, const std::vector<double>& y) {
  return fit_scaled(r, y, [](double v) { return v * v * std::log1p(v); });
}

}  // namespace elab
