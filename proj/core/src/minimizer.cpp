#include "entropylab/minimizer.hpp"

#include "entropylab/errors.hpp"
#include "entropylab/local_fit.hpp"

#include <Eigen/SparseCholesky>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace elab {

namespace {

double xlogx_sq(double p) {
  const double p2 = p * p;
  return p2 > 0.0 ? p2 * std::log(p2) : 0.0;
}

double constant_term(double tau) { return std::log(4.0 * kPi * tau) + 2.0; }

// β may cover the boundary nodes only, which come first.
void require_lengths(const FemOperators& ops, const Field& phi, const Field& beta) {
  if (phi.size() != ops.m.size()) throw ValidationError("phi length does not match the mesh");
  if (beta.size() > phi.size()) throw ValidationError("beta is longer than the node list");
  if (beta.size() < phi.size() && ops.b.tail(phi.size() - beta.size()).cwiseAbs().maxCoeff() > 0.0)
    throw ValidationError("beta must cover every boundary node");
}

Field normalized(const FemOperators& ops, Field phi) {
  const double n = std::sqrt(ops.m.dot(phi.cwiseAbs2()));
  if (!(n > 0.0)) throw ValidationError("start vector has zero norm");
  return phi / n;
}

struct Descent {
  Field phi;
  double e = 0.0;
  int iterations = 0;
  bool converged = false;
  int floor_hits = 0;
};

Descent descend(const FemOperators& ops, const Eigen::SimplicialLDLT<SpMat>& P, Field phi, double tau,
                const Field& beta, const MinimizerOptions& opt) {
  Descent out;
  phi = normalized(ops, phi);
  double e = energy(ops, phi, tau, beta);
  double alpha = 1.0;
  int small_steps = 0;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    const Field g = energy_gradient(ops, phi, tau, beta);
    const Field mphi = ops.m.cwiseProduct(phi);
    const Field Pmphi = P.solve(mphi);
    Field d = -P.solve(g);
    d -= (mphi.dot(d) / mphi.dot(Pmphi)) * Pmphi;
    const double slope = g.dot(d);
    const double scale = std::max(1.0, std::abs(e));
    if (-slope <= opt.tol * scale) {
      out.converged = true;
      break;
    }
    double a = std::min(1.0, 2.0 * alpha);
    Field q;
    double eq = e;
    bool accepted = false;
    while (a >= 1e-14) {
      q = phi + a * d;
      const double floor = opt.floor_rel * q.maxCoeff();
      q = q.cwiseMax(floor);
      q = normalized(ops, q);
      eq = energy(ops, q, tau, beta);
      if (eq <= e + 1e-4 * a * slope) {
        accepted = true;
        break;
      }
      a *= 0.5;
    }
    if (!accepted) {
      // no descent along a direction with tiny slope: stationary to rounding
      out.converged = -slope <= 1e3 * opt.tol * scale;
      break;
    }
    const double decrease = e - eq;
    phi = std::move(q);
    e = eq;
    alpha = a;
    small_steps = decrease <= opt.tol * scale ? small_steps + 1 : 0;
    if (small_steps >= 3) {
      out.converged = true;
      ++it;
      break;
    }
  }
  out.iterations = it;
  out.phi = std::move(phi);
  out.e = e;
  const double floor = opt.floor_rel * out.phi.maxCoeff();
  out.floor_hits = static_cast<int>((out.phi.array() <= floor * (1.0 + 1e-12)).count());
  return out;
}

}  // namespace

double energy(const FemOperators& ops, const Field& phi, double tau, const Field& beta) {
  if (!(tau > 0.0)) throw ValidationError("tau must be positive");
  require_lengths(ops, phi, beta);
  if ((phi.array() <= 0.0).any()) throw ValidationError("energy needs phi > 0 at every node");
  double ent = 0.0;
  for (Eigen::Index i = 0; i < phi.size(); ++i) ent += ops.m[i] * xlogx_sq(phi[i]);
  const Eigen::Index nb = beta.size();
  const Field p2 = phi.head(nb).cwiseAbs2();
  return 4.0 * tau * phi.dot(ops.K * phi) - ent + 2.0 * tau * ops.b.head(nb).dot(beta.cwiseProduct(p2)) -
         constant_term(tau);
}

Field energy_gradient(const FemOperators& ops, const Field& phi, double tau, const Field& beta) {
  require_lengths(ops, phi, beta);
  Field g = 8.0 * tau * (ops.K * phi);
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    const double p = phi[i];
    g[i] += -2.0 * ops.m[i] * p * (std::log(p * p) + 1.0);
    if (i < beta.size()) g[i] += 4.0 * tau * ops.b[i] * beta[i] * p;
  }
  return g;
}

MinimizerResult minimize(const TriMesh& mesh, const FemOperators& ops, double tau, const Field& beta_boundary,
                         const MinimizerOptions& opt) {
  if (!(tau > 0.0)) throw ValidationError("tau must be positive");
  if (opt.max_iter <= 0 || !(opt.tol > 0.0)) throw ValidationError("invalid minimizer options");
  const Field beta = extend_boundary(mesh, beta_boundary);

  SpMat P = 8.0 * tau * ops.K;
  {
    Field diag = ops.m + 4.0 * tau * ops.b.cwiseProduct(beta.cwiseMax(0.0));
    for (int i = 0; i < mesh.size(); ++i) P.coeffRef(i, i) += diag[i];
  }
  Eigen::SimplicialLDLT<SpMat> chol(P);
  if (chol.info() != Eigen::Success) throw NumericalError("minimizer", "preconditioner factorisation failed");

  std::vector<std::pair<std::string, Field>> starts;
  starts.emplace_back("constant", Field::Ones(mesh.size()));
  for (size_t s = 0; s < opt.starts.size(); ++s) {
    if (opt.starts[s].size() != mesh.size() || (opt.starts[s].array() <= 0.0).any())
      throw ValidationError("user start " + std::to_string(s) + " must be positive with one value per node");
    starts.emplace_back("user" + std::to_string(s), opt.starts[s]);
  }
  if (opt.multistart) {
    auto gaussian_at = [&](const Vec2& c) {
      Field g(mesh.size());
      for (int i = 0; i < mesh.size(); ++i) g[i] = std::exp(-(mesh.nodes[i] - c).squaredNorm() / (8.0 * tau));
      return Field(g.cwiseMax(1e-8));
    };
    starts.emplace_back("centroid", gaussian_at(mesh.boundary_curve().centroid()));
    std::vector<int> picks;
    auto extreme = [&](auto key) {
      int best = 0;
      for (int k = 1; k < mesh.n_boundary; ++k)
        if (key(mesh.nodes[k]) > key(mesh.nodes[best])) best = k;
      return best;
    };
    picks.push_back(extreme([](const Vec2& p) { return p.x(); }));
    picks.push_back(extreme([](const Vec2& p) { return -p.x(); }));
    picks.push_back(extreme([](const Vec2& p) { return p.y(); }));
    picks.push_back(extreme([](const Vec2& p) { return -p.y(); }));
    std::vector<int> seen;
    for (int k : picks) {
      if (std::find(seen.begin(), seen.end(), k) != seen.end()) continue;
      seen.push_back(k);
      starts.emplace_back("boundary" + std::to_string(k), gaussian_at(mesh.nodes[k]));
    }
  }

  MinimizerResult res;
  std::vector<Descent> runs;
  for (auto& [label, phi0] : starts) {
    Descent d = descend(ops, chol, phi0, tau, beta, opt);
    res.starts.push_back({label, d.e, d.iterations, d.converged});
    runs.push_back(std::move(d));
  }
  std::vector<size_t> order(runs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return runs[a].e < runs[b].e; });
  const Descent& best = runs[order[0]];
  if (order.size() > 1) {
    const Descent& second = runs[order[1]];
    res.uniqueness_distance = std::sqrt(ops.m.dot((best.phi - second.phi).cwiseAbs2()));
  }

  res.phi = best.phi;
  res.energy = best.e;
  res.iterations = best.iterations;
  res.converged = best.converged;
  res.floor_hits = best.floor_hits;
  const Field u = res.phi.cwiseAbs2();
  res.f_min = f_from_u(u.cwiseMax(std::numeric_limits<double>::min()), tau);

  const EntropyReport rep = w_beta(mesh, ops, res.f_min, tau, beta_boundary);
  res.mu = rep.ibp_value;
  double var = 0.0;
  for (int i = 0; i < mesh.size(); ++i) var += ops.m[i] * u[i] * (rep.W_field[i] - res.mu) * (rep.W_field[i] - res.mu);
  res.W_constancy = std::sqrt(var);

  const Field g = energy_gradient(ops, res.phi, tau, beta);
  const double lambda = 0.5 * res.phi.dot(g);
  res.mu_multiplier = lambda - 1.0 - std::log(4.0 * kPi * tau);
  const Field r = g - 2.0 * lambda * ops.m.cwiseProduct(res.phi);
  res.el_residual = std::sqrt(r.cwiseAbs2().cwiseQuotient(ops.m).sum());

  if (!res.converged) {
    res.warnings.push_back("minimizer did not converge within max_iter");
    spdlog::warn("minimizer: no convergence after {} iterations (E = {:.10g})", res.iterations, res.energy);
  }
  if (res.floor_hits > mesh.size() / 100) {
    res.warnings.push_back("phi at the positivity floor on more than 1% of nodes; boundary layer too thin for h");
    spdlog::warn("minimizer: {} nodes at the positivity floor", res.floor_hits);
  }
  if (res.uniqueness_distance > 1e-3) {
    res.warnings.push_back("distinct starts reached different critical points (uniqueness probe)");
  }
  return res;
}

ElReport verify_euler_lagrange(const MinimizerResult& result, const TriMesh& mesh, const FemOperators& ops,
                               double tau, const Field& beta_boundary) {
  const Field beta = extend_boundary(mesh, beta_boundary);
  ElReport rep;
  const Field g = energy_gradient(ops, result.phi, tau, beta);
  const double lambda = 0.5 * result.phi.dot(g) / ops.m.dot(result.phi.cwiseAbs2());
  const Field r = g - 2.0 * lambda * ops.m.cwiseProduct(result.phi);
  rep.weak_residual = std::sqrt(r.cwiseAbs2().cwiseQuotient(ops.m).sum());

  std::vector<int> centres(static_cast<size_t>(mesh.n_boundary));
  std::iota(centres.begin(), centres.end(), 0);
  const LocalFit fit(mesh.nodes, centres);
  const auto D = fit.derivatives(result.f_min);
  const auto nrm = mesh.boundary_curve().outward_normals();
  double num = 0.0, den = 0.0;
  for (int k = 0; k < mesh.n_boundary; ++k) {
    const double dn = D(k, fit.column(1, 0)) * nrm[k].x() + D(k, fit.column(0, 1)) * nrm[k].y();
    const double w = ops.b[k] * result.phi[k] * result.phi[k];
    num += w * (dn - beta_boundary[k]) * (dn - beta_boundary[k]);
    den += w;
  }
  rep.bc_residual = std::sqrt(num / den);
  rep.multiplier_gap = std::abs(result.mu_multiplier - result.mu);
  return rep;
}

}  // namespace elab
