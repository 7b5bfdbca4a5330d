#include "entropylab/evolution_identity.hpp"

#include "entropylab/constants.hpp"
#include "entropylab/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <vector>

namespace elab {

Poly2 Poly2::monomial(double c, int a, int b) {
  if (a < 0 || b < 0) throw ValidationError("negative exponent");
  Poly2 p;
  if (c != 0.0) p.c_[{a, b}] = c;
  return p;
}

Poly2 Poly2::operator+(const Poly2& o) const {
  Poly2 r = *this;
  for (const auto& [e, v] : o.c_) r.c_[e] += v;
  return r;
}

Poly2 Poly2::operator-(const Poly2& o) const { return *this + o * -1.0; }

Poly2 Poly2::operator*(const Poly2& o) const {
  Poly2 r;
  for (const auto& [e1, v1] : c_)
    for (const auto& [e2, v2] : o.c_) r.c_[{e1.first + e2.first, e1.second + e2.second}] += v1 * v2;
  return r;
}

Poly2 Poly2::operator*(double s) const {
  Poly2 r = *this;
  for (auto& kv : r.c_) kv.second *= s;
  return r;
}

Poly2 Poly2::dx() const {
  Poly2 r;
  for (const auto& [e, v] : c_)
    if (e.first > 0) r.c_[{e.first - 1, e.second}] += v * e.first;
  return r;
}

Poly2 Poly2::dy() const {
  Poly2 r;
  for (const auto& [e, v] : c_)
    if (e.second > 0) r.c_[{e.first, e.second - 1}] += v * e.second;
  return r;
}

double Poly2::operator()(double x, double y) const {
  double s = 0.0;
  for (const auto& [e, v] : c_) s += v * std::pow(x, e.first) * std::pow(y, e.second);
  return s;
}

double Poly2::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& kv : c_) m = std::max(m, std::abs(kv.second));
  return m;
}

double bochner_residual(const Poly2& f, const std::vector<Vec2>& points) {
  const Poly2 fx = f.dx(), fy = f.dy();
  const Poly2 fxx = fx.dx(), fxy = fx.dy(), fyy = fy.dy();
  const Poly2 g2 = fx * fx + fy * fy;
  const Poly2 lap_g2 = g2.dx().dx() + g2.dy().dy();
  const Poly2 hess2 = fxx * fxx + fxy * fxy * 2.0 + fyy * fyy;
  const Poly2 lap = fxx + fyy;
  const Poly2 rhs = hess2 * 2.0 + (fx * lap.dx() + fy * lap.dy()) * 2.0;
  const Poly2 res = lap_g2 - rhs;
  double m = 0.0;
  for (const auto& p : points) m = std::max(m, std::abs(res(p.x(), p.y())));
  return m;
}

namespace {

using Arr = Eigen::ArrayXXd;

constexpr double kC1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
constexpr double kC2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};

struct Fields {
  Arr f, fx, fy, fxx, fxy, fyy, W, w;
};

// Derivatives on indices [lo, S-1-lo] of a field valid on [lo-2, S-1-(lo-2)].
void derivs(const Arr& F, double dx, int lo, Arr& Fx, Arr& Fy, Arr& Fxx, Arr& Fxy, Arr& Fyy) {
  const int S = static_cast<int>(F.rows());
  Fx = Fy = Fxx = Fxy = Fyy = Arr::Constant(S, S, std::nan(""));
  for (int i = lo; i < S - lo; ++i) {
    for (int j = lo; j < S - lo; ++j) {
      double ax = 0, ay = 0, axx = 0, ayy = 0, axy = 0;
      for (int a = 0; a < 5; ++a) {
        ax += kC1[a] * F(i + a - 2, j);
        ay += kC1[a] * F(i, j + a - 2);
        axx += kC2[a] * F(i + a - 2, j);
        ayy += kC2[a] * F(i, j + a - 2);
        for (int b = 0; b < 5; ++b)
          if (kC1[a] != 0.0 && kC1[b] != 0.0) axy += kC1[a] * kC1[b] * F(i + a - 2, j + b - 2);
      }
      Fx(i, j) = ax / dx;
      Fy(i, j) = ay / dx;
      Fxx(i, j) = axx / (dx * dx);
      Fyy(i, j) = ayy / (dx * dx);
      Fxy(i, j) = axy / (dx * dx);
    }
  }
}

Fields fields_at(const GaussianSum& g, const IdentityGrid& grid, int N, double tau) {
  const int S = 2 * N + 1;
  Fields F;
  F.f.resize(S, S);
  for (int i = 0; i < S; ++i) {
    for (int j = 0; j < S; ++j) {
      const Vec2 x = grid.origin + grid.dx * Vec2(i - N, j - N);
      double qmin = std::numeric_limits<double>::infinity();
      std::vector<double> q(g.centres.size());
      for (size_t c = 0; c < g.centres.size(); ++c) {
        q[c] = (x - g.centres[c]).squaredNorm() / (4.0 * tau);
        qmin = std::min(qmin, q[c]);
      }
      double s = 0.0;
      for (size_t c = 0; c < q.size(); ++c) s += g.weights[c] * std::exp(-(q[c] - qmin));
      // u = e^{-qmin} s/(4πτ), f = -log u - log 4πτ
      F.f(i, j) = qmin - std::log(s);
    }
  }
  derivs(F.f, grid.dx, 2, F.fx, F.fy, F.fxx, F.fxy, F.fyy);
  const Arr lap = F.fxx + F.fyy;
  const Arr g2 = F.fx.square() + F.fy.square();
  F.W = tau * (2.0 * lap - g2) + F.f - 2.0;
  F.w = 2.0 * lap - g2 - 2.0 / tau;
  return F;
}

}  // namespace

IdentityResidual identity_residual(const GaussianSum& g, const IdentityGrid& grid) {
  if (g.centres.empty() || g.centres.size() != g.weights.size())
    throw ValidationError("Gaussian centres and weights must be non-empty and of equal length");
  for (double w : g.weights)
    if (!(w > 0.0)) throw ValidationError("Gaussian weights must be positive");
  if (!(grid.dx > 0.0) || !(grid.window > 0.0)) throw ValidationError("grid spacing and window must be positive");
  const int half = static_cast<int>(std::ceil(grid.window / grid.dx - 1e-9));
  if (half < 2) throw ValidationError("grid too coarse for fourth-order stencils");
  const double dt = grid.dt > 0.0 ? grid.dt : grid.dx;
  const double tau = g.T - grid.t;
  if (!(tau - dt > 0.0)) throw ValidationError("tau must stay positive across the time stencil");

  const int N = half + 4;
  const Fields F0 = fields_at(g, grid, N, tau);
  // t + dt has τ - dt
  const Fields Fp = fields_at(g, grid, N, tau - dt);
  const Fields Fm = fields_at(g, grid, N, tau + dt);

  Arr Wx, Wy, Wxx, Wxy, Wyy, wx, wy, wxx, wxy, wyy;
  derivs(F0.W, grid.dx, 4, Wx, Wy, Wxx, Wxy, Wyy);
  derivs(F0.w, grid.dx, 4, wx, wy, wxx, wxy, wyy);

  IdentityResidual r;
  const double d = 1.0 / (2.0 * tau);
  for (int i = N - half; i <= N + half; ++i) {
    for (int j = N - half; j <= N + half; ++j) {
      const double fx = F0.fx(i, j), fy = F0.fy(i, j);
      const double fxx = F0.fxx(i, j), fxy = F0.fxy(i, j), fyy = F0.fyy(i, j);
      const double Wt = (Fp.W(i, j) - Fm.W(i, j)) / (2.0 * dt);
      const double lhs = Wt + Wxx(i, j) + Wyy(i, j);
      const double rhs = 2.0 * tau * ((fxx - d) * (fxx - d) + 2.0 * fxy * fxy + (fyy - d) * (fyy - d)) +
                         2.0 * (Wx(i, j) * fx + Wy(i, j) * fy);
      r.w_identity = std::max(r.w_identity, std::abs(lhs - rhs));

      const double wt = (Fp.w(i, j) - Fm.w(i, j)) / (2.0 * dt);
      const double lhs_w = wt + wxx(i, j) + wyy(i, j);
      const double rhs_w = 2.0 * (fxx * fxx + 2.0 * fxy * fxy + fyy * fyy) - 2.0 / (tau * tau) +
                           2.0 * (fx * wx(i, j) + fy * wy(i, j));
      r.w_equation = std::max(r.w_equation, std::abs(lhs_w - rhs_w));
      r.max_abs_W = std::max(r.max_abs_W, std::abs(F0.W(i, j)));
      ++r.points;
    }
  }
  return r;
}

ConvergenceStudy identity_convergence(const GaussianSum& g, const std::vector<double>& dxs, IdentityGrid grid) {
  if (dxs.size() < 2) throw ValidationError("convergence study needs at least two spacings");
  ConvergenceStudy c;
  const bool fixed_dt = grid.dt > 0.0;
  for (double dx : dxs) {
    grid.dx = dx;
    if (!fixed_dt) grid.dt = 0.0;
    c.dx.push_back(dx);
    c.residual.push_back(identity_residual(g, grid).w_identity);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(dxs.size());
  for (size_t i = 0; i < dxs.size(); ++i) {
    const double x = std::log(c.dx[i]), y = std::log(c.residual[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  c.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return c;
}

}  // namespace elab
