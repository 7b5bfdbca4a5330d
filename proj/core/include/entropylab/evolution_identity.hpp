#pragma once

#include "entropylab/geometry.hpp"

#include <map>
#include <utility>
#include <vector>

namespace elab {

// Bivariate polynomial with exact differentiation.
class Poly2 {
 public:
  Poly2() = default;
  static Poly2 monomial(double c, int a, int b);

  Poly2 operator+(const Poly2& o) const;
  Poly2 operator-(const Poly2& o) const;
  Poly2 operator*(const Poly2& o) const;
  Poly2 operator*(double s) const;
  Poly2 dx() const;
  Poly2 dy() const;
  double operator()(double x, double y) const;
  double max_abs_coefficient() const;

 private:
  std::map<std::pair<int, int>, double> c_;
};

// max over points of |Δ|∇f|² - 2|∇²f|² - 2∇f·∇Δf|.
double bochner_residual(const Poly2& f, const std::vector<Vec2>& points);

// u = Σ wᵢ e^{-|x - cᵢ|²/4τ}/(4πτ), τ = T - t; solves (∂ₜ + Δ)u = 0.
struct GaussianSum {
  std::vector<Vec2> centres;
  std::vector<double> weights;
  double T = 1.0;
};

struct IdentityGrid {
  double dx = 0.1;
  double window = 1.0;  // residuals over |x|∞ ≤ window
  double t = 0.0;
  double dt = 0.0;      // time step of the centered difference; 0 means dt = dx
  Vec2 origin = Vec2::Zero();
};

struct IdentityResidual {
  // (∂ₜ + Δ)W - 2τ|∇²f - I/2τ|² - 2∇W·∇f
  double w_identity = 0.0;
  // (∂ₜ + Δ)w - 2|∇²f|² + 2/τ² - 2∇f·∇w,  w = 2Δf - |∇f|² - 2/τ
  double w_equation = 0.0;
  double max_abs_W = 0.0;
  int points = 0;
};

// Fourth-order central differences in space, second-order centered in time,
// on a static square grid. f is evaluated through a shifted log-sum-exp.
IdentityResidual identity_residual(const GaussianSum& u, const IdentityGrid& grid);

struct ConvergenceStudy {
  std::vector<double> dx;
  std::vector<double> residual;
  double order = 0.0;  // least-squares slope of log residual against log dx
};
ConvergenceStudy identity_convergence(const GaussianSum& u, const std::vector<double>& dxs, IdentityGrid grid = {});

}  // namespace elab
