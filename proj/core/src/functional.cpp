#include "entropylab/functional.hpp"

#include "entropylab/errors.hpp"

#include <cmath>

namespace elab {

namespace {

void require_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be positive and finite");
}

}  // namespace

Field u_from_f(const Field& f, double tau, AmbientDimension dim) {
  require_tau(tau);
  const double c = dim.half() * std::log(4.0 * kPi * tau);
  return (-(f.array() + c)).exp().matrix();
}

Field f_from_u(const Field& u, double tau, AmbientDimension dim) {
  require_tau(tau);
  if (!(u.array() > 0.0).all()) throw ValidationError("density must be positive to recover f");
  const double c = dim.half() * std::log(4.0 * kPi * tau);
  return (-(u.array().log()) - c).matrix();
}

double log_mass(const FemOperators& ops, const Field& f, double tau) {
  require_tau(tau);
  if (f.size() != ops.m.size()) throw ValidationError("field length does not match mesh");
  const double fmin = f.minCoeff();
  if (!std::isfinite(fmin)) throw ValidationError("f has non-finite values");
  const double s = ops.m.dot((-(f.array() - fmin)).exp().matrix());
  if (!(s > 0.0)) throw NumericalError("functional", "integral of u vanished");
  return std::log(s) - fmin - std::log(4.0 * kPi * tau);
}

Normalized normalize(const FemOperators& ops, const Field& f, double tau) {
  const double lm = log_mass(ops, f, tau);
  return {(f.array() + lm).matrix(), lm};
}

Field extend_boundary(const TriMesh& mesh, const Field& beta_boundary) {
  if (beta_boundary.size() != mesh.n_boundary)
    throw ValidationError("boundary field has " + std::to_string(beta_boundary.size()) + " values, boundary has " +
                          std::to_string(mesh.n_boundary));
  if (!beta_boundary.allFinite()) throw ValidationError("boundary field has non-finite values");
  Field b = Field::Zero(mesh.size());
  b.head(mesh.n_boundary) = beta_boundary;
  return b;
}

EntropyReport w_beta(const TriMesh& mesh, const FemOperators& ops, const Field& f_in, double tau,
                     const Field& beta_boundary) {
  require_tau(tau);
  const Field beta = extend_boundary(mesh, beta_boundary);
  EntropyReport r;
  const double lm = log_mass(ops, f_in, tau);
  r.normalization = std::exp(lm);
  Field f = f_in;
  if (std::abs(r.normalization - 1.0) > 1e-6) {
    r.shift = lm;
    f.array() += lm;
  }
  const Field u = u_from_f(f, tau);
  const Field phi = u.cwiseSqrt();
  const Field Kphi = ops.K * phi;
  r.gradient_integral = 4.0 * tau * phi.dot(Kphi);
  r.potential_integral = ops.m.dot(((f.array() - 2.0) * u.array()).matrix());
  r.boundary_integral = 2.0 * tau * ops.b.dot(beta.cwiseProduct(u));
  r.W_beta = r.gradient_integral + r.potential_integral + r.boundary_integral;

  // ratio Kφ/φ is scale invariant; use a max-normalised φ to stay clear of underflow
  const double fmin = f.minCoeff();
  const Field psi = (-(0.5 * (f.array() - fmin))).exp().matrix();
  const Field Kpsi = ops.K * psi;
  r.W_field.resize(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) {
    const double ratio = psi[i] > 0.0 ? Kpsi[i] / psi[i] : 0.0;
    r.W_field[i] = 4.0 * tau * ratio / ops.m[i] + 2.0 * tau * ops.b[i] * beta[i] / ops.m[i] + f[i] - 2.0;
  }
  r.ibp_value = ops.m.dot(r.W_field.cwiseProduct(u));
  r.ibp_gap = std::abs(r.W_beta - r.ibp_value);
  return r;
}

Field radial_beta(const TriMesh& mesh, double tau) {
  require_tau(tau);
  const Curve c = mesh.boundary_curve();
  const auto n = c.outward_normals();
  Field b(mesh.n_boundary);
  for (int k = 0; k < mesh.n_boundary; ++k) b[k] = mesh.nodes[k].dot(n[k]) / (2.0 * tau);
  return b;
}

Field curvature_beta(const TriMesh& mesh) { return mesh.boundary_curve().curvature(); }

}  // namespace elab
