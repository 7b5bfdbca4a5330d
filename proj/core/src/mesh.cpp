#include "entropylab/mesh.hpp"

#include "entropylab/errors.hpp"
#include "spatial.hpp"

#include <boost/polygon/voronoi.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace elab {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double tri_area(const Vec2& a, const Vec2& b, const Vec2& c) { return 0.5 * cross(b - a, c - a); }

// Boundary nodes: curve vertices, with long segments split so no boundary edge exceeds ~h.
std::vector<Vec2> boundary_nodes(const Curve& c, double h, std::vector<int>* source) {
  std::vector<Vec2> out;
  source->clear();
  for (int i = 0; i < c.size(); ++i) {
    const Vec2& a = c[i];
    const Vec2& b = c[c.next(i)];
    const double l = (b - a).norm();
    out.push_back(a);
    source->push_back(i);
    if (l > 1.5 * h) {
      const int pieces = static_cast<int>(std::ceil(l / h));
      for (int k = 1; k < pieces; ++k) {
        out.push_back(a + (b - a) * (static_cast<double>(k) / pieces));
        source->push_back(-1);
      }
    }
  }
  return out;
}

}  // namespace

namespace {

// Delaunay triangles with centroid inside the loop; every loop edge must be present.
std::vector<std::array<int, 3>> conforming_triangles(const std::vector<Vec2>& pts, const Curve& loop) {
  auto all = delaunay(pts);
  std::vector<std::array<int, 3>> kept;
  kept.reserve(all.size());
  for (const auto& t : all) {
    const Vec2 c = (pts[t[0]] + pts[t[1]] + pts[t[2]]) / 3.0;
    if (loop.contains(c)) kept.push_back(t);
  }
  std::set<std::pair<int, int>> edges;
  for (const auto& t : kept)
    for (int i = 0; i < 3; ++i) edges.emplace(t[i], t[(i + 1) % 3]);
  for (int i = 0; i < loop.size(); ++i)
    if (!edges.count({i, loop.next(i)}))
      throw NumericalError("mesh_fem", "boundary edge " + std::to_string(i) + " missing from triangulation", -1,
                           "use a smaller h or a smoother curve");
  return kept;
}

}  // namespace

double TriMesh::triangle_area(int t) const {
  const auto& T = tris[static_cast<size_t>(t)];
  return tri_area(nodes[T[0]], nodes[T[1]], nodes[T[2]]);
}

double TriMesh::area() const {
  double a = 0.0;
  for (int t = 0; t < static_cast<int>(tris.size()); ++t) a += triangle_area(t);
  return a;
}

std::vector<std::array<int, 2>> TriMesh::boundary_edges() const {
  std::vector<std::array<int, 2>> e(static_cast<size_t>(n_boundary));
  for (int k = 0; k < n_boundary; ++k) e[k] = {k, boundary_next(k)};
  return e;
}

std::vector<Vec2> TriMesh::boundary_edge_normals() const {
  std::vector<Vec2> n(static_cast<size_t>(n_boundary));
  for (int k = 0; k < n_boundary; ++k) {
    const Vec2 e = nodes[boundary_next(k)] - nodes[k];
    n[k] = Vec2(e.y(), -e.x()).normalized();
  }
  return n;
}

Curve TriMesh::boundary_curve() const {
  return Curve(std::vector<Vec2>(nodes.begin(), nodes.begin() + n_boundary));
}

TriMesh TriMesh::with_nodes(std::vector<Vec2> moved) const {
  if (moved.size() != nodes.size()) throw ValidationError("moved node count does not match the mesh");
  TriMesh m = *this;
  m.nodes = std::move(moved);
  return m;
}

std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& points) {
  namespace bp = boost::polygon;
  if (points.size() < 3) throw ValidationError("Delaunay needs at least 3 points");
  Vec2 lo = points[0], hi = points[0];
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double ext = std::max((hi - lo).maxCoeff(), 1e-300);
  const double scale = static_cast<double>(1 << 28) / ext;
  std::vector<bp::point_data<int>> q;
  q.reserve(points.size());
  for (const auto& p : points)
    q.emplace_back(static_cast<int>(std::llround((p.x() - lo.x()) * scale)) - (1 << 27),
                   static_cast<int>(std::llround((p.y() - lo.y()) * scale)) - (1 << 27));
  {
    std::vector<std::pair<int, int>> keys;
    keys.reserve(q.size());
    for (const auto& p : q) keys.emplace_back(p.x(), p.y());
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
      throw NumericalError("mesh_fem", "coincident points after quantisation in Delaunay input");
  }
  bp::voronoi_diagram<double> vd;
  bp::construct_voronoi(q.begin(), q.end(), &vd);
  std::vector<std::array<int, 3>> tris;
  tris.reserve(2 * points.size());
  std::vector<int> ring;
  for (const auto& vertex : vd.vertices()) {
    ring.clear();
    const auto* e = vertex.incident_edge();
    do {
      ring.push_back(static_cast<int>(e->cell()->source_index()));
      e = e->rot_next();
    } while (e != vertex.incident_edge());
    for (size_t i = 1; i + 1 < ring.size(); ++i) {
      std::array<int, 3> t{ring[0], ring[i], ring[i + 1]};
      if (tri_area(points[t[0]], points[t[1]], points[t[2]]) < 0) std::swap(t[1], t[2]);
      tris.push_back(t);
    }
  }
  return tris;
}

double min_angle_deg(const TriMesh& mesh, int* worst_triangle) {
  double best = 180.0;
  for (int t = 0; t < static_cast<int>(mesh.tris.size()); ++t) {
    const auto& T = mesh.tris[t];
    for (int i = 0; i < 3; ++i) {
      const Vec2 u = mesh.nodes[T[(i + 1) % 3]] - mesh.nodes[T[i]];
      const Vec2 v = mesh.nodes[T[(i + 2) % 3]] - mesh.nodes[T[i]];
      const double ang = std::atan2(std::abs(cross(u, v)), u.dot(v)) * 180.0 / 3.14159265358979323846;
      if (ang < best) {
        best = ang;
        if (worst_triangle) *worst_triangle = t;
      }
    }
  }
  return best;
}

void check_orientation(const TriMesh& mesh) {
  for (int t = 0; t < static_cast<int>(mesh.tris.size()); ++t) {
    if (!(mesh.triangle_area(t) > 1e-14)) {
      std::ostringstream os;
      os << "triangle " << t << " has area " << mesh.triangle_area(t);
      throw NumericalError("mesh_fem", os.str(), -1, "the moved mesh tangled; use smaller time steps");
    }
  }
}

TriMesh triangulate(const Curve& curve, double h, const MeshOptions& options) {
  curve.require_simple_ccw(3);
  if (!(h > 0.0)) throw ValidationError("mesh size h must be positive");
  if (h > 4.0 * curve.min_segment() * (1.0 + 1e-12))
    throw ValidationError("mesh size h exceeds 4 x the shortest curve segment");

  TriMesh mesh;
  mesh.h = h;
  std::vector<Vec2> bnd = boundary_nodes(curve, h, &mesh.curve_vertex);
  const Curve loop{std::vector<Vec2>(bnd)};
  const int nb = loop.size();
  const auto L = loop.segment_lengths();
  const auto vn = loop.outward_normals();

  std::vector<Vec2> pts = bnd;
  std::vector<double> spacing(static_cast<size_t>(nb));
  for (int i = 0; i < nb; ++i) spacing[i] = 0.5 * (L[i] + L[loop.prev(i)]);

  const Box2 bb = loop.bounding_box();
  double smin = *std::min_element(L.begin(), L.end());
  detail::PointGrid grid(bb.lo, bb.hi, std::max(0.5 * smin, 1e-12));
  for (int i = 0; i < nb; ++i) grid.insert(i, bnd[i]);

  // staggered offset layers along the inward normal
  double band = 0.0;
  const double rt3 = std::sqrt(3.0) / 2.0;
  for (int k = 1; k <= options.layers; ++k) {
    for (int i = 0; i < nb; ++i) {
      Vec2 base, nrm;
      double sp;
      if (k % 2 == 1) {
        const Vec2 e = bnd[loop.next(i)] - bnd[i];
        base = bnd[i] + 0.5 * e;
        nrm = Vec2(e.y(), -e.x()) / L[i];
        sp = L[i];
      } else {
        base = bnd[i];
        nrm = vn[i];
        sp = spacing[i];
      }
      const double depth = k * rt3 * sp;
      const Vec2 p = base - depth * nrm;
      if (!loop.contains(p)) continue;
      if (loop.distance(p) < 0.7 * depth) continue;
      if (grid.any_within(p, 0.5 * sp)) continue;
      grid.insert(static_cast<int>(pts.size()), p);
      pts.push_back(p);
      band = std::max(band, depth);
    }
  }

  // triangular lattice anchored at the bounding-box corner
  const double dy = h * rt3;
  const long ny = static_cast<long>(std::ceil((bb.hi.y() - bb.lo.y()) / dy)) + 1;
  const long nx = static_cast<long>(std::ceil((bb.hi.x() - bb.lo.x()) / h)) + 2;
  for (long j = 0; j < ny; ++j) {
    for (long i = 0; i < nx; ++i) {
      const Vec2 p(bb.lo.x() + i * h + 0.5 * h * (j % 2), bb.lo.y() + j * dy);
      if (!loop.contains(p)) continue;
      if (loop.distance(p) <= band + 0.55 * h) continue;
      if (grid.any_within(p, 0.5 * h)) continue;
      grid.insert(static_cast<int>(pts.size()), p);
      pts.push_back(p);
    }
  }

  auto kept = conforming_triangles(pts, loop);
  // drop unused points (boundary nodes are always used and stay first)
  std::vector<int> remap(pts.size(), -1);
  for (const auto& t : kept)
    for (int v : t) remap[v] = 0;
  int next = 0;
  for (size_t i = 0; i < pts.size(); ++i)
    if (remap[i] == 0) remap[i] = next++;
  mesh.nodes.reserve(static_cast<size_t>(next));
  for (size_t i = 0; i < pts.size(); ++i)
    if (remap[i] >= 0) mesh.nodes.push_back(pts[i]);
  for (auto& t : kept)
    for (int& v : t) v = remap[v];
  mesh.tris = std::move(kept);
  mesh.n_boundary = nb;
  for (int i = 0; i < nb; ++i)
    if (remap[i] != i) throw NumericalError("mesh_fem", "boundary node " + std::to_string(i) + " unused");

  // Laplacian smoothing of interior nodes, retriangulated after each pass
  for (int pass = 0; pass < options.smoothing_passes; ++pass) {
    std::vector<Vec2> sum(mesh.nodes.size(), Vec2::Zero());
    std::vector<int> cnt(mesh.nodes.size(), 0);
    std::set<std::pair<int, int>> edges;
    for (const auto& t : mesh.tris)
      for (int i = 0; i < 3; ++i) edges.emplace(std::min(t[i], t[(i + 1) % 3]), std::max(t[i], t[(i + 1) % 3]));
    for (const auto& [a, b] : edges) {
      sum[a] += mesh.nodes[b];
      sum[b] += mesh.nodes[a];
      ++cnt[a];
      ++cnt[b];
    }
    for (int i = nb; i < mesh.size(); ++i) mesh.nodes[i] = sum[i] / cnt[i];
    auto tris = conforming_triangles(mesh.nodes, loop);
    for (const auto& t : tris)
      for (int v : t)
        if (v >= mesh.size()) throw NumericalError("mesh_fem", "smoothing lost a node");
    mesh.tris = std::move(tris);
  }

  check_orientation(mesh);
  int worst = -1;
  const double ang = min_angle_deg(mesh, &worst);
  if (ang < options.min_angle_deg) {
    const auto& T = mesh.tris[worst];
    std::ostringstream os;
    os.precision(6);
    os << "mesh quality " << ang << " deg below " << options.min_angle_deg << " deg; worst triangle " << worst
       << " at (" << mesh.nodes[T[0]].transpose() << "), (" << mesh.nodes[T[1]].transpose() << "), ("
       << mesh.nodes[T[2]].transpose() << ")";
    throw NumericalError("mesh_fem", os.str(), -1, "choose h closer to the boundary spacing");
  }
  return mesh;
}

}  // namespace elab
