#pragma once

#include "entropylab/constants.hpp"
#include "entropylab/fem.hpp"
#include "entropylab/geometry.hpp"
#include "entropylab/mesh.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <vector>

namespace elab::test {

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1);
  return v;
}

// Boundary discretised so that segment lengths are close to h.
inline Curve circle_h(double R, double h, Vec2 c = Vec2::Zero()) {
  return Curve::circle(R, std::max(16, static_cast<int>(std::ceil(2.0 * kPi * R / h))), c);
}

inline double u_weighted_l2(const FemOperators& ops, const Field& u, const Field& a, const Field& b) {
  return std::sqrt(ops.m.cwiseProduct(u).dot((a - b).cwiseAbs2()) / ops.m.dot(u));
}

// ∫₀^R g(r) 2πr dr by adaptive Gauss–Kronrod.
template <class G>
double radial_integral(G g, double R) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate([&](double r) { return g(r) * 2.0 * kPi * r; }, 0.0, R, 12, 1e-13);
}

}  // namespace elab::test
