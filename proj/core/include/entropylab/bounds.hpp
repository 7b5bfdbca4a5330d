#pragma once

#include "entropylab/constants.hpp"
#include "entropylab/fem.hpp"

#include <cstdint>
#include <string>

namespace elab {

// Trial-family estimates of
//   c_S:     ‖ψ‖₂ ≤ c_S (‖∇ψ‖₁ + ‖ψ‖₁)
//   c_trace: ∫_{∂Ω}ψ ≤ c_trace (‖∇ψ‖₁ + ‖ψ‖₁)   for ψ ≥ 0.
// Both are maxima over the family, so they under-estimate the true constants.
struct SobolevConstants {
  double c_S = 0.0;
  double c_trace = 0.0;
  std::string c_S_witness;
  std::string c_trace_witness;
  int trials = 0;
};
SobolevConstants log_sobolev_constants(const TriMesh& mesh, const FemOperators& ops, std::uint64_t seed = 7,
                                       int random_trials = 48);

// Lower bound for μ_β(Ω, τ) assembled step by step:
//   trace:       2τ∫βφ² ≥ -2τ‖∇φ‖² - 2τBc_t(Bc_t + 1)          (B = sup|β|)
//   rescaling:   x = √(2τ) y turns 2τ∫|∇φ|² - ∫φ²logφ² - log 4πτ into the
//                unit-ε log-Sobolev functional minus log 2π, with Sobolev
//                constant c_S(1 + √(2τ)) on the rescaled domain
//   log-Sobolev: ∫(ε|∇ψ|² - ψ²logψ²) ≥ -(1 - N + N log N + N log c) - 1/ε
struct LowerBoundChain {
  double sobolev_constant = 0.0;  // c_S (1 + √(2τ))
  double log_sobolev = 0.0;       // -(1 - N + N log N + N log c) - 1
  double rescaling = 0.0;         // -log 2π
  double constant = 0.0;          // -N from W's "-(n+1)"
  double trace = 0.0;             // -2τBc_t(Bc_t + 1)
  double total = 0.0;
};
LowerBoundChain lower_bound_rhs(double tau, double sup_beta, const SobolevConstants& c,
                                AmbientDimension dim = kPlanar);

// Right-hand side of the log-Sobolev inequality at ε.
double log_sobolev_rhs(double eps, double c_S, AmbientDimension dim = kPlanar);

struct LogSobolevCheck {
  double lhs = 0.0;  // ∫(ε|∇φ|² - φ² log φ²)
  double rhs = 0.0;
  bool holds = false;
};
// φ must satisfy ∫φ² = 1 within 1e-8. ∫φ² log φ² uses a 7-point rule per triangle.
LogSobolevCheck log_sobolev_check(const TriMesh& mesh, const FemOperators& ops, const Field& phi, double eps,
                                  double c_S);

// Cutoff ζ = cos²(π(|x-x₀|/r - 1/2)) on r/2 ≤ |x-x₀| ≤ r gives
// 4r²|∇ζ|²/ζ ≤ 16π²; the boundary term carries coefficient 2.
double upper_bound_constant();

struct UpperBound {
  double value = 0.0;
  double V_full = 0.0;
  double V_half = 0.0;
  double beta_integral = 0.0;
  double log_term = 0.0;
  double ratio_term = 0.0;
};
// log(V(Ω∩B_r)/r^dim) + c (V(Ω∩B_r) + r²∫|β|dS) / V(Ω∩B_{r/2}); bound for μ_β(Ω, r²).
UpperBound volume_ratio_upper_bound(double V_full, double V_half, double beta_integral, double r,
                                    AmbientDimension dim = kPlanar);
// Polygonal domain with per-vertex β, exact clipping.
UpperBound volume_ratio_upper_bound(const Curve& domain, const Field& beta_vertex, const Vec2& center, double r);

}  // namespace elab
