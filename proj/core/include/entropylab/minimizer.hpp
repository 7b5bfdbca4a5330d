#pragma once

#include "entropylab/functional.hpp"

#include <string>
#include <vector>

namespace elab {

// E(φ) = 4τφᵀKφ - Σmᵢφᵢ²log φᵢ² + 2τΣbᵢβᵢφᵢ² - log(4πτ) - 2, which equals
// W_β for u = φ² when Σmφ² = 1. β is given on the boundary nodes or on all
// nodes (zero inside).
double energy(const FemOperators& ops, const Field& phi, double tau, const Field& beta);
Field energy_gradient(const FemOperators& ops, const Field& phi, double tau, const Field& beta);

struct MinimizerOptions {
  int max_iter = 20000;
  double tol = 1e-9;
  double floor_rel = 1e-12;
  // extra starts: heat-kernel profiles at the centroid and at extreme boundary points
  bool multistart = true;
  std::vector<Field> starts;  // user-supplied starting φ (positive)
};

struct StartOutcome {
  std::string label;
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct MinimizerResult {
  Field phi;
  Field f_min;
  double mu = 0.0;             // u-weighted mean of the W field
  double mu_multiplier = 0.0;  // from the Lagrange multiplier
  double energy = 0.0;
  double el_residual = 0.0;    // ‖∇E - 2λMφ‖ in the M⁻¹ norm
  double W_constancy = 0.0;    // u-weighted standard deviation of the W field
  double uniqueness_distance = 0.0;  // u-weighted L² distance to the runner-up start
  int iterations = 0;
  bool converged = false;
  int floor_hits = 0;
  std::vector<StartOutcome> starts;
  std::vector<std::string> warnings;
};

MinimizerResult minimize(const TriMesh& mesh, const FemOperators& ops, double tau, const Field& beta_boundary,
                         const MinimizerOptions& options = {});

struct ElReport {
  double weak_residual = 0.0;  // el_residual recomputed
  double bc_residual = 0.0;    // RMS of ∂νf - β over the boundary, weighted by u dS
  double multiplier_gap = 0.0; // |μ(multiplier) - μ(W mean)|
};
ElReport verify_euler_lagrange(const MinimizerResult& result, const TriMesh& mesh, const FemOperators& ops,
                               double tau, const Field& beta_boundary);

}  // namespace elab
