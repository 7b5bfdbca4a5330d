#include "entropylab/fem.hpp"

#include "entropylab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace elab {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SpMat from_triplets(int n, const Triplets& t) {
  SpMat A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  return A;
}

}  // namespace

FemOperators assemble(const TriMesh& mesh) {
  const int n = mesh.size();
  const int nt = static_cast<int>(mesh.tris.size());
  if (n == 0 || nt == 0) throw ValidationError("cannot assemble on an empty mesh");
  FemOperators ops;
  ops.area.resize(static_cast<size_t>(nt));
  ops.grad.resize(static_cast<size_t>(nt));
  Triplets tk, tm;
  tk.reserve(9 * static_cast<size_t>(nt));
  tm.reserve(9 * static_cast<size_t>(nt));
  ops.m = Field::Zero(n);
  for (int t = 0; t < nt; ++t) {
    const auto& T = mesh.tris[t];
    const double a = mesh.triangle_area(t);
    if (!(a > 1e-14))
      throw NumericalError("mesh_fem", "degenerate triangle " + std::to_string(t) + " in assembly");
    ops.area[t] = a;
    for (int i = 0; i < 3; ++i) {
      const Vec2 e = mesh.nodes[T[(i + 2) % 3]] - mesh.nodes[T[(i + 1) % 3]];
      ops.grad[t][i] = Vec2(-e.y(), e.x()) / (2.0 * a);
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        tk.emplace_back(T[i], T[j], a * ops.grad[t][i].dot(ops.grad[t][j]));
        tm.emplace_back(T[i], T[j], a / 12.0 * (i == j ? 2.0 : 1.0));
      }
      ops.m[T[i]] += a / 3.0;
    }
  }
  ops.K = from_triplets(n, tk);
  ops.M = from_triplets(n, tm);
  ops.b = Field::Zero(n);
  for (int k = 0; k < mesh.n_boundary; ++k) {
    const int j = mesh.boundary_next(k);
    const double l = (mesh.nodes[j] - mesh.nodes[k]).norm();
    ops.b[k] += 0.5 * l;
    ops.b[j] += 0.5 * l;
  }
  return ops;
}

SpMat FemOperators::boundary_mass(const TriMesh& mesh, const Field& w) const {
  if (w.size() != mesh.n_boundary) throw ValidationError("boundary weight length does not match boundary");
  Triplets t;
  t.reserve(4 * static_cast<size_t>(mesh.n_boundary));
  for (int k = 0; k < mesh.n_boundary; ++k) {
    const int j = mesh.boundary_next(k);
    const double l = (mesh.nodes[j] - mesh.nodes[k]).norm();
    const double wa = w[k], wb = w[j];
    // ∫ (wa λa + wb λb) λp λq over the edge
    t.emplace_back(k, k, l * (3 * wa + wb) / 12.0);
    t.emplace_back(j, j, l * (wa + 3 * wb) / 12.0);
    t.emplace_back(k, j, l * (wa + wb) / 12.0);
    t.emplace_back(j, k, l * (wa + wb) / 12.0);
  }
  return from_triplets(mesh.size(), t);
}

SpMat ale_convection(const TriMesh& mesh, const FemOperators& ops, const std::vector<Vec2>& w) {
  if (static_cast<int>(w.size()) != mesh.size()) throw ValidationError("velocity length does not match mesh");
  Triplets t;
  t.reserve(9 * mesh.tris.size());
  for (size_t e = 0; e < mesh.tris.size(); ++e) {
    const auto& T = mesh.tris[e];
    const double a3 = ops.area[e] / 3.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t.emplace_back(T[i], T[j], a3 * ops.grad[e][i].dot(w[T[j]]));
  }
  return from_triplets(mesh.size(), t);
}

std::vector<Vec2> recover_gradient(const TriMesh& mesh, const Field& f) {
  if (f.size() != mesh.size()) throw ValidationError("field length does not match mesh");
  std::vector<Vec2> g(static_cast<size_t>(mesh.size()), Vec2::Zero());
  std::vector<double> w(static_cast<size_t>(mesh.size()), 0.0);
  for (size_t e = 0; e < mesh.tris.size(); ++e) {
    const auto& T = mesh.tris[e];
    const double a = mesh.triangle_area(static_cast<int>(e));
    Vec2 gt = Vec2::Zero();
    for (int i = 0; i < 3; ++i) {
      const Vec2 d = mesh.nodes[T[(i + 2) % 3]] - mesh.nodes[T[(i + 1) % 3]];
      gt += f[T[i]] * Vec2(-d.y(), d.x()) / (2.0 * a);
    }
    for (int v : T) {
      g[v] += a * gt;
      w[v] += a;
    }
  }
  for (int i = 0; i < mesh.size(); ++i) {
    if (w[i] <= 0.0) throw ValidationError("isolated vertex " + std::to_string(i) + " in gradient recovery");
    g[i] /= w[i];
  }
  return g;
}

std::vector<Eigen::Matrix2d> recover_hessian(const TriMesh& mesh, const Field& f) {
  const auto g = recover_gradient(mesh, f);
  Field gx(mesh.size()), gy(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) {
    gx[i] = g[i].x();
    gy[i] = g[i].y();
  }
  const auto hx = recover_gradient(mesh, gx);
  const auto hy = recover_gradient(mesh, gy);
  std::vector<Eigen::Matrix2d> H(static_cast<size_t>(mesh.size()));
  for (int i = 0; i < mesh.size(); ++i) {
    const double off = 0.5 * (hx[i].y() + hy[i].x());
    H[i] << hx[i].x(), off, off, hy[i].y();
  }
  return H;
}

MeshLocator::MeshLocator(const TriMesh& mesh) : mesh_(&mesh) {
  Vec2 lo = mesh.nodes[0], hi = mesh.nodes[0];
  for (const auto& p : mesh.nodes) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  lo_ = lo;
  const Vec2 ext = hi - lo;
  cell_ = std::max(std::sqrt(2.0 * std::max(ext.x() * ext.y(), 1e-300) / mesh.tris.size()), 1e-12);
  nx_ = static_cast<long>(ext.x() / cell_) + 1;
  ny_ = static_cast<long>(ext.y() / cell_) + 1;
  buckets_.resize(static_cast<size_t>(nx_ * ny_));
  for (int t = 0; t < static_cast<int>(mesh.tris.size()); ++t) {
    const auto& T = mesh.tris[t];
    Vec2 a = mesh.nodes[T[0]], b = a;
    for (int v : T) {
      a = a.cwiseMin(mesh.nodes[v]);
      b = b.cwiseMax(mesh.nodes[v]);
    }
    const long x0 = std::clamp(static_cast<long>((a.x() - lo_.x()) / cell_), 0L, nx_ - 1);
    const long x1 = std::clamp(static_cast<long>((b.x() - lo_.x()) / cell_), 0L, nx_ - 1);
    const long y0 = std::clamp(static_cast<long>((a.y() - lo_.y()) / cell_), 0L, ny_ - 1);
    const long y1 = std::clamp(static_cast<long>((b.y() - lo_.y()) / cell_), 0L, ny_ - 1);
    for (long gx = x0; gx <= x1; ++gx)
      for (long gy = y0; gy <= y1; ++gy) buckets_[static_cast<size_t>(gx * ny_ + gy)].push_back(t);
  }
}

int MeshLocator::locate(const Vec2& p, Eigen::Vector3d* bary) const {
  const long gx = static_cast<long>(std::floor((p.x() - lo_.x()) / cell_));
  const long gy = static_cast<long>(std::floor((p.y() - lo_.y()) / cell_));
  if (gx < 0 || gy < 0 || gx >= nx_ || gy >= ny_) return -1;
  int best = -1;
  double best_min = -1e300;
  Eigen::Vector3d best_l = Eigen::Vector3d::Zero();
  for (int t : buckets_[static_cast<size_t>(gx * ny_ + gy)]) {
    const auto& T = mesh_->tris[t];
    const Vec2& a = mesh_->nodes[T[0]];
    const Vec2& b = mesh_->nodes[T[1]];
    const Vec2& c = mesh_->nodes[T[2]];
    const double det = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
    const Vec2 d = p - a;
    const double l1 = (d.x() * (c - a).y() - d.y() * (c - a).x()) / det;
    const double l2 = ((b - a).x() * d.y() - (b - a).y() * d.x()) / det;
    const Eigen::Vector3d l(1.0 - l1 - l2, l1, l2);
    const double mn = l.minCoeff();
    if (mn > best_min) {
      best_min = mn;
      best = t;
      best_l = l;
    }
  }
  if (best < 0 || best_min < -1e-10) return -1;
  if (bary) *bary = best_l;
  return best;
}

Field interpolate(const TriMesh& source, const Field& f, const std::vector<Vec2>& targets) {
  if (f.size() != source.size()) throw ValidationError("field length does not match source mesh");
  MeshLocator loc(source);
  const Curve bnd = source.boundary_curve();
  Field out(static_cast<Eigen::Index>(targets.size()));
  for (size_t i = 0; i < targets.size(); ++i) {
    Eigen::Vector3d l;
    const int t = loc.locate(targets[i], &l);
    if (t >= 0) {
      const auto& T = source.tris[t];
      out[i] = l[0] * f[T[0]] + l[1] * f[T[1]] + l[2] * f[T[2]];
      continue;
    }
    int seg = 0;
    double s = 0.0;
    const Vec2 q = bnd.closest_point(targets[i], &seg, &s);
    if ((q - targets[i]).norm() > 2.0 * source.h)
      throw ValidationError("interpolation target " + std::to_string(i) + " lies more than 2h outside the source");
    out[i] = (1.0 - s) * f[seg] + s * f[source.boundary_next(seg)];
  }
  return out;
}

Field interpolate(const TriMesh& source, const Field& f, const TriMesh& target) {
  return interpolate(source, f, target.nodes);
}

}  // namespace elab
