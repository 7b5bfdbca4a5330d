#pragma once

#include "entropylab/geometry.hpp"

#include <Eigen/Core>

#include <array>
#include <vector>

namespace elab {

struct FitOptions {
  int degree = 3;
  int neighbours = 25;
};

// Weighted least-squares polynomial fits on k-nearest-neighbour patches.
// Coordinates are scaled by the patch radius (distance to the k-th
// neighbour) and weighted by exp(-|d|²). The operator depends only on the
// point geometry, so one instance serves every field on the same nodes.
class LocalFit {
 public:
  LocalFit(const std::vector<Vec2>& points, std::vector<int> centres, const FitOptions& options = {});

  int degree() const { return degree_; }
  int centres() const { return static_cast<int>(centres_.size()); }
  // Column of ∂x^a ∂y^c in the derivative table.
  int column(int a, int c) const;

  // Partial derivatives of the local fit at each centre: row per centre,
  // column per monomial (see column()).
  Eigen::MatrixXd derivatives(const Field& values) const;

 private:
  int degree_;
  std::vector<int> centres_;
  std::vector<std::array<int, 2>> exps_;
  std::vector<std::vector<int>> nbr_;
  std::vector<Eigen::MatrixXd> op_;  // rows: monomials, scaled to derivatives
};

}  // namespace elab
