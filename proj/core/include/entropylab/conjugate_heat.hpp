#pragma once

#include "entropylab/flow.hpp"
#include "entropylab/mesh.hpp"
#include "entropylab/minimizer.hpp"

#include <Eigen/SparseCholesky>

#include <vector>

namespace elab {

// Moves a reference mesh onto other curves with the same vertex count.
// Boundary nodes follow their source curve vertex (inserted nodes keep their
// segment parameter); interior nodes follow the discrete harmonic extension
// of the boundary displacement. The extension reproduces affine maps exactly.
class MeshMotion {
 public:
  MeshMotion(TriMesh reference, const Curve& reference_curve);

  const TriMesh& reference() const { return ref_; }
  std::vector<Vec2> nodes_for(const Curve& boundary) const;
  TriMesh mesh_for(const Curve& boundary) const { return ref_.with_nodes(nodes_for(boundary)); }

 private:
  TriMesh ref_;
  int curve_size_ = 0;
  std::vector<int> segment_;
  std::vector<double> param_;
  SpMat K_IB_;
  Eigen::SimplicialLDLT<SpMat> K_II_;
};

// Reference mesh size for snapshot k when h refers to the t = 0 domain.
double reference_h(const FlowTrajectory& trajectory, int index, double h0);

// Boundary speed β at a snapshot: curvature for flows, zero for stationary domains.
Field snapshot_beta(const FlowTrajectory& trajectory, const TriMesh& mesh);

struct EndData {
  int index = 0;
  TriMesh mesh;
  Field u;  // φ², Σmu = 1
  Field beta;
  MinimizerResult minimizer;
};
// Minimizer of the entropy on the snapshot mesh with β = H. Throws
// NumericalError when the minimization does not converge.
EndData end_data(const FlowTrajectory& trajectory, int t0_index, double h, const MinimizerOptions& minimizer = {},
                 const MeshOptions& mesh = {});

struct BackwardOptions {
  int substeps = 1;  // implicit steps between consecutive snapshots
  double drift_budget = 1e-3;
  double step_drift_budget = 1e-5;
};

struct BackwardSolveState {
  FlowTrajectory trajectory;  // snapshots [0, t0 index]
  TriMesh reference;          // connectivity; nodes at t₀
  std::vector<std::vector<Vec2>> nodes;
  std::vector<Field> u;
  std::vector<double> mass;       // ∫u per snapshot
  std::vector<double> step_mass;  // ∫u after every implicit step, in marching order
  double max_drift = 0.0;
  double max_step_drift = 0.0;
  bool drift_flagged = false;
  int clamped_steps = 0;
  double mu_end = 0.0;

  int size() const { return static_cast<int>(u.size()); }
  TriMesh mesh(int k) const { return reference.with_nodes(nodes[static_cast<size_t>(k)]); }
};

// Marches s = t₀ - t from the end data to t = trajectory[0].t. Implicit
// Euler in ALE form on the moved reference mesh:
//   (diag(m') + Δs(K' + C'))u' = diag(m)u,   C'_ij = ∫φⱼ w·∇φᵢ,
// with w the mesh velocity in s. The natural boundary condition of this form
// is ∂νu = -(w·ν)u = -βu, and ∫u is conserved by construction.
BackwardSolveState backward_solve(const FlowTrajectory& trajectory, const EndData& end,
                                  const BackwardOptions& options = {});

// f = -log u - log(4πτ) at a snapshot.
Field f_from_state(const BackwardSolveState& state, int snapshot);

}  // namespace elab
