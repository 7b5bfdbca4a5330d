#include "entropylab/bounds.hpp"

#include "entropylab/errors.hpp"

#include <array>
#include <cmath>
#include <random>

namespace elab {

namespace {

// 7-point degree-5 rule on the reference triangle: barycentric points and weights (sum 1).
struct QuadPoint {
  std::array<double, 3> l;
  double w;
};
const std::array<QuadPoint, 7>& dunavant7() {
  static const std::array<QuadPoint, 7> q = [] {
    const double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
    const double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
    return std::array<QuadPoint, 7>{{{{1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.225},
                                     {{a1, b1, b1}, w1},
                                     {{b1, a1, b1}, w1},
                                     {{b1, b1, a1}, w1},
                                     {{a2, b2, b2}, w2},
                                     {{b2, a2, b2}, w2},
                                     {{b2, b2, a2}, w2}}};
  }();
  return q;
}

struct Norms {
  double l2 = 0.0;
  double l1 = 0.0;
  double grad_l1 = 0.0;
  double boundary = 0.0;
};

Norms norms(const TriMesh& mesh, const FemOperators& ops, const Field& psi) {
  Norms n;
  n.l2 = std::sqrt(psi.dot(ops.M * psi));
  n.l1 = ops.m.dot(psi.cwiseAbs());
  for (size_t t = 0; t < mesh.tris.size(); ++t) {
    const auto& T = mesh.tris[t];
    Vec2 g = Vec2::Zero();
    for (int i = 0; i < 3; ++i) g += psi[T[i]] * ops.grad[t][i];
    n.grad_l1 += ops.area[t] * g.norm();
  }
  n.boundary = ops.b.dot(psi);
  return n;
}

}  // namespace

SobolevConstants log_sobolev_constants(const TriMesh& mesh, const FemOperators& ops, std::uint64_t seed,
                                       int random_trials) {
  SobolevConstants c;
  const Curve bnd = mesh.boundary_curve();
  const Box2 bb = bnd.bounding_box();
  const double diam = (bb.hi - bb.lo).norm();
  const int n = mesh.size();

  auto consider = [&](const Field& psi, const std::string& label, bool nonneg) {
    const Norms nm = norms(mesh, ops, psi);
    const double den = nm.grad_l1 + nm.l1;
    if (!(den > 0.0)) return;
    ++c.trials;
    const double s = nm.l2 / den;
    if (s > c.c_S) {
      c.c_S = s;
      c.c_S_witness = label;
    }
    if (nonneg) {
      const double t = nm.boundary / den;
      if (t > c.c_trace) {
        c.c_trace = t;
        c.c_trace_witness = label;
      }
    }
  };

  consider(Field::Ones(n), "constant", true);

  const Vec2 centroid = bnd.centroid();
  std::vector<Vec2> centres{centroid};
  const int stride = std::max(1, mesh.n_boundary / 8);
  for (int k = 0; k < mesh.n_boundary; k += stride) centres.push_back(mesh.nodes[k]);
  for (int k = 0; k < mesh.n_boundary; k += stride) centres.push_back(0.5 * (mesh.nodes[k] + centroid));
  for (double frac : {0.03, 0.06, 0.12, 0.25, 0.5}) {
    const double s2 = 2.0 * std::pow(frac * diam, 2);
    for (size_t j = 0; j < centres.size(); ++j) {
      Field psi(n);
      for (int i = 0; i < n; ++i) psi[i] = std::exp(-(mesh.nodes[i] - centres[j]).squaredNorm() / s2);
      consider(psi, "gaussian(" + std::to_string(frac) + "," + std::to_string(j) + ")", true);
    }
  }

  // boundary layers 1 - d/δ
  Field dist(n);
  for (int i = 0; i < n; ++i) dist[i] = i < mesh.n_boundary ? 0.0 : bnd.distance(mesh.nodes[i]);
  const double hb = bnd.length() / mesh.n_boundary;
  for (double k : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
    const double delta = k * hb;
    Field psi = (1.0 - dist.array() / delta).cwiseMax(0.0).matrix();
    consider(psi, "boundary_layer(" + std::to_string(k) + "h)", true);
  }

  for (int kx = 0; kx <= 3; ++kx) {
    for (int ky = 0; ky <= 3; ++ky) {
      if (kx == 0 && ky == 0) continue;
      const Vec2 k = kPi * Vec2(kx, ky) / (0.5 * diam);
      Field psi(n);
      for (int i = 0; i < n; ++i) psi[i] = 1.0 + std::cos(k.dot(mesh.nodes[i] - bb.lo));
      consider(psi, "cosine(" + std::to_string(kx) + "," + std::to_string(ky) + ")", true);
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int r = 0; r < random_trials; ++r) {
    Field g = Field::Zero(n);
    for (int j = 0; j < 6; ++j) {
      const double ang = 2.0 * kPi * unit(rng);
      const double freq = (1.0 + 6.0 * unit(rng)) * kPi / diam;
      const double amp = 2.0 * unit(rng);
      const double ph = 2.0 * kPi * unit(rng);
      const Vec2 k = freq * Vec2(std::cos(ang), std::sin(ang));
      for (int i = 0; i < n; ++i) g[i] += amp * std::cos(k.dot(mesh.nodes[i]) + ph);
    }
    consider(g.array().exp().matrix(), "random(" + std::to_string(r) + ")", true);
  }
  return c;
}

double log_sobolev_rhs(double eps, double c_S, AmbientDimension dim) {
  if (!(eps > 0.0)) throw ValidationError("epsilon must be positive");
  if (!(c_S > 0.0)) throw ValidationError("Sobolev constant must be positive");
  const double N = dim.value;
  return -(1.0 - N + N * std::log(N) + N * std::log(c_S)) - 1.0 / eps;
}

LowerBoundChain lower_bound_rhs(double tau, double sup_beta, const SobolevConstants& c, AmbientDimension dim) {
  if (!(tau > 0.0)) throw ValidationError("tau must be positive");
  if (sup_beta < 0.0) throw ValidationError("sup |beta| must be non-negative");
  LowerBoundChain ch;
  ch.sobolev_constant = c.c_S * (1.0 + std::sqrt(2.0 * tau));
  ch.log_sobolev = log_sobolev_rhs(1.0, ch.sobolev_constant, dim);
  ch.rescaling = -0.5 * dim.value * std::log(2.0 * kPi);
  ch.constant = -dim.value;
  const double bc = sup_beta * c.c_trace;
  ch.trace = -2.0 * tau * bc * (bc + 1.0);
  ch.total = ch.log_sobolev + ch.rescaling + ch.constant + ch.trace;
  return ch;
}

LogSobolevCheck log_sobolev_check(const TriMesh& mesh, const FemOperators& ops, const Field& phi, double eps,
                                  double c_S) {
  if (phi.size() != mesh.size()) throw ValidationError("field length does not match mesh");
  const double mass = phi.dot(ops.M * phi);
  if (std::abs(mass - 1.0) > 1e-8) throw ValidationError("log-Sobolev check needs a normalised field");
  double ent = 0.0;
  for (size_t t = 0; t < mesh.tris.size(); ++t) {
    const auto& T = mesh.tris[t];
    double s = 0.0;
    for (const auto& q : dunavant7()) {
      const double v = q.l[0] * phi[T[0]] + q.l[1] * phi[T[1]] + q.l[2] * phi[T[2]];
      const double v2 = v * v;
      if (v2 > 0.0) s += q.w * v2 * std::log(v2);
    }
    ent += ops.area[t] * s;
  }
  LogSobolevCheck r;
  r.lhs = eps * phi.dot(ops.K * phi) - ent;
  r.rhs = log_sobolev_rhs(eps, c_S);
  r.holds = r.lhs >= r.rhs;
  return r;
}

double upper_bound_constant() { return std::max(16.0 * kPi * kPi, 2.0); }

UpperBound volume_ratio_upper_bound(double V_full, double V_half, double beta_integral, double r,
                                    AmbientDimension dim) {
  if (!(r > 0.0)) throw ValidationError("ball radius must be positive");
  if (!(V_half > 0.0)) throw ValidationError("empty half ball: V(Omega ∩ B_{r/2}) = 0");
  UpperBound u;
  u.V_full = V_full;
  u.V_half = V_half;
  u.beta_integral = beta_integral;
  u.log_term = std::log(V_full / std::pow(r, dim.value));
  u.ratio_term = upper_bound_constant() * (V_full + r * r * beta_integral) / V_half;
  u.value = u.log_term + u.ratio_term;
  return u;
}

UpperBound volume_ratio_upper_bound(const Curve& domain, const Field& beta_vertex, const Vec2& center, double r) {
  const double vf = disk_intersection_area(domain, center, r);
  const double vh = disk_intersection_area(domain, center, 0.5 * r);
  const double bi = boundary_integral_in_disk(domain, beta_vertex, center, r);
  return volume_ratio_upper_bound(vf, vh, bi, r, kPlanar);
}

}  // namespace elab
