#pragma once

#include "entropylab/conjugate_heat.hpp"
#include "entropylab/local_fit.hpp"

#include <string>
#include <vector>

namespace elab {

// 2τ Σ mᵢ ‖∇²f(xᵢ) - I/2τ‖²_F uᵢ with Hessians from local cubic fits.
double volume_term(const LocalFit& fit, const FemOperators& ops, const Field& f, const Field& u, double tau);
double volume_term(const TriMesh& mesh, const FemOperators& ops, const Field& f, const Field& u, double tau,
                   const FitOptions& fit = {});

// -∫⟨∇W, ν⟩u dS at a snapshot. ∇W is taken from
//   W = τ(|∇f|² - 2∂ₜf) + f + const,
// which follows from the f-equation and trades the third derivatives of f
// for the time derivative at fixed x. ∂ₜf is the centered difference along
// mesh nodes minus w·∇f (w the node velocity); spatial derivatives come from
// local fits centred at the boundary nodes.
double boundary_term_direct(const BackwardSolveState& state, int snapshot, const FitOptions& fit = {});

struct HarnackTerm {
  double value = 0.0;  // 2τ∫(∂ₜβ - 2∂ₛβ V + κV² - β/2τ) u dS
  Field integrand;     // per boundary node, before the 2τu weight
  bool one_sided = false;
};
// V defaults to ∂ₛf. ∂ₜβ follows the normal line through each boundary node to
// the neighbouring snapshots' curves.
HarnackTerm boundary_term_harnack(const BackwardSolveState& state, int snapshot, const Field* V = nullptr);

struct HarnackOptions {
  FitOptions fit;
  // time skipped before t₀; negative selects five snapshot spacings
  double compat_window = -1.0;
  int stride = 1;
  bool keep_integrand = false;
};

struct HarnackRecord {
  int index = 0;
  double t = 0.0;
  double tau = 0.0;
  double W_beta = 0.0;
  double dW_dt_fd = 0.0;
  double volume_term = 0.0;
  double boundary_term_direct = 0.0;
  double boundary_term_harnack = 0.0;
  double identity_gap_a = 0.0;      // |dW/dt - volume - direct|
  double identity_gap_gradw = 0.0;  // |direct - harnack|
  double conjecture_value = 0.0;    // boundary_term_harnack
  bool one_sided = false;
  bool retained = false;  // centered and outside the compatibility window
  Field integrand;
};

struct HarnackReport {
  std::vector<HarnackRecord> records;
  std::vector<double> W_all;  // W_β at every snapshot
  double window = 0.0;
  double max_gap_a = 0.0;      // over retained records
  double max_gap_gradw = 0.0;
  // conjecture_value ≥ 0 at every retained record, and whether W_β is then non-decreasing
  bool conjecture_nonnegative = false;
  bool W_nondecreasing = false;
};

HarnackReport rate_identity_check(const BackwardSolveState& state, const HarnackOptions& options = {});

}  // namespace elab
