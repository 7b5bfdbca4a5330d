#pragma once

#include "entropylab/geometry.hpp"

#include <array>
#include <vector>

namespace elab {

// P1 triangulation. Nodes [0, n_boundary) are the boundary loop in CCW order;
// boundary edge k joins node k and node (k+1) mod n_boundary.
struct TriMesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> tris;
  int n_boundary = 0;
  // source curve vertex of each boundary node, -1 for nodes inserted on a long segment
  std::vector<int> curve_vertex;
  double h = 0.0;

  int size() const { return static_cast<int>(nodes.size()); }
  int boundary_next(int k) const { return k + 1 == n_boundary ? 0 : k + 1; }
  double area() const;
  double triangle_area(int t) const;
  std::vector<std::array<int, 2>> boundary_edges() const;
  // unit outward normal of each boundary edge
  std::vector<Vec2> boundary_edge_normals() const;
  Curve boundary_curve() const;
  // Same connectivity, moved nodes.
  TriMesh with_nodes(std::vector<Vec2> moved) const;
};

struct MeshOptions {
  int layers = 4;
  double min_angle_deg = 20.0;
  // Laplacian smoothing passes over interior nodes, each followed by a fresh
  // Delaunay triangulation.
  int smoothing_passes = 1;
};

// Quality triangulation of the region enclosed by an embedded CCW curve.
// Precondition: h ≤ 4·min segment. Segments longer than 1.5h are split.
// Throws ValidationError for invalid curves and NumericalError when the
// quality bound cannot be met (message names the worst triangle).
TriMesh triangulate(const Curve& curve, double h, const MeshOptions& options = {});

// Delaunay triangulation of a point set (Boost.Polygon Voronoi dual on
// quantised coordinates). Triangles are CCW.
std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& points);

double min_angle_deg(const TriMesh& mesh, int* worst_triangle = nullptr);
// Throws NumericalError on a non-positive or tiny triangle.
void check_orientation(const TriMesh& mesh);

}  // namespace elab
