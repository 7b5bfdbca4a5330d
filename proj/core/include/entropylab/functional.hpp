#pragma once

#include "entropylab/constants.hpp"
#include "entropylab/fem.hpp"

namespace elab {

// u = e^{-f} / (4πτ)^{dim/2}
Field u_from_f(const Field& f, double tau, AmbientDimension dim = kPlanar);
// Inverse of u_from_f. Throws ValidationError on non-positive u.
Field f_from_u(const Field& u, double tau, AmbientDimension dim = kPlanar);

// log ∫u for the P1 interpolant of u, evaluated through a max-shifted
// log-sum-exp so large f does not underflow.
double log_mass(const FemOperators& ops, const Field& f, double tau);

struct Normalized {
  Field f;
  double log_mass;  // log ∫u before the shift; f = f_in + log_mass
};
Normalized normalize(const FemOperators& ops, const Field& f, double tau);

// Boundary data lives on boundary nodes; extends it by zero to all nodes.
Field extend_boundary(const TriMesh& mesh, const Field& beta_boundary);

struct EntropyReport {
  double W_beta = 0.0;
  double normalization = 1.0;  // ∫u of the input before any shift
  double shift = 0.0;          // added to f when the input was not normalised
  double ibp_value = 0.0;      // ∫ W u
  double ibp_gap = 0.0;
  Field W_field;
  // intermediate integrals of W_beta
  double gradient_integral = 0.0;   // τ∫|∇f|²u, as 4τ φᵀKφ with φ = √u
  double potential_integral = 0.0;  // ∫(f - 2)u
  double boundary_integral = 0.0;   // 2τ∫βu dS
};

// W_β(Ω, f, τ) with β given on boundary nodes. Gradient term in stiffness
// form of φ = √u, zero-order and boundary terms by nodal quadrature.
// The nodal W field is 4τ(Kφ)ᵢ/(mᵢφᵢ) + 2τbᵢβᵢ/mᵢ + fᵢ - 2, the weak form of
// τ(2Δf - |∇f|²) + f - 2 with Neumann data β, so ∫Wu = W_β exactly.
EntropyReport w_beta(const TriMesh& mesh, const FemOperators& ops, const Field& f, double tau,
                     const Field& beta_boundary);

// Boundary data for the common choices.
enum class BetaKind { kZero, kMeanCurvature, kRadial, kFile };
// β = x·ν/(2τ) with vertex normals of the boundary loop.
Field radial_beta(const TriMesh& mesh, double tau);
// Turning-angle curvature of the boundary loop.
Field curvature_beta(const TriMesh& mesh);

}  // namespace elab
