#pragma once

#include "entropylab/mesh.hpp"

#include <Eigen/Sparse>

#include <array>
#include <memory>
#include <vector>

namespace elab {

using SpMat = Eigen::SparseMatrix<double>;

// P1 operators on a fixed mesh. K is the negative-Laplacian form.
struct FemOperators {
  SpMat K;                 // ∫∇φᵢ·∇φⱼ
  SpMat M;                 // ∫φᵢφⱼ
  Field m;                 // lumped mass (row sums of M)
  Field b;                 // lumped boundary mass (l_{k-1}+l_k)/2 on boundary nodes, 0 inside
  std::vector<double> area;
  std::vector<std::array<Vec2, 3>> grad;  // barycentric gradients per triangle

  // Consistent ∫_{∂Ω} w φᵢφⱼ dS for a weight given per boundary node (P1 along edges).
  SpMat boundary_mass(const TriMesh& mesh, const Field& w_boundary) const;
};

FemOperators assemble(const TriMesh& mesh);

// ALE transport matrix C_ij = Σ_T |T|/3 ∇φᵢ·w_j with a nodal mesh velocity w
// (vertex quadrature of ∫φⱼ w·∇φᵢ). Columns sum to zero.
SpMat ale_convection(const TriMesh& mesh, const FemOperators& ops, const std::vector<Vec2>& w);

// Area-weighted average of per-triangle gradients at each node.
std::vector<Vec2> recover_gradient(const TriMesh& mesh, const Field& f);
// Recovery applied to the recovered gradient components, symmetrised.
std::vector<Eigen::Matrix2d> recover_hessian(const TriMesh& mesh, const Field& f);

// Point location in a fixed mesh.
class MeshLocator {
 public:
  explicit MeshLocator(const TriMesh& mesh);
  // Triangle containing p (tolerant to rounding), -1 when outside.
  int locate(const Vec2& p, Eigen::Vector3d* bary) const;

 private:
  const TriMesh* mesh_;
  Vec2 lo_;
  double cell_;
  long nx_, ny_;
  std::vector<std::vector<int>> buckets_;
};

// Barycentric interpolation; points outside the source take the value at the
// nearest boundary point. Throws ValidationError beyond 2h outside.
Field interpolate(const TriMesh& source, const Field& f, const std::vector<Vec2>& targets);
Field interpolate(const TriMesh& source, const Field& f, const TriMesh& target);

}  // namespace elab
