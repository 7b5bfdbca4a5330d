#include "entropylab/local_fit.hpp"

#include "entropylab/errors.hpp"
#include "spatial.hpp"

#include <Eigen/SVD>

#include <array>
#include <cmath>

namespace elab {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

LocalFit::LocalFit(const std::vector<Vec2>& points, std::vector<int> centres, const FitOptions& options)
    : degree_(options.degree), centres_(std::move(centres)) {
  if (degree_ < 1 || degree_ > 5) throw ValidationError("fit degree must be between 1 and 5");
  for (int k = 0; k <= degree_; ++k)
    for (int a = k; a >= 0; --a) exps_.push_back({a, k - a});
  const int p = static_cast<int>(exps_.size());
  const int k = options.neighbours;
  if (k < p + 2) throw ValidationError("patch too small for the fit degree");
  if (static_cast<int>(points.size()) < k) throw ValidationError("fewer points than the patch size");

  const auto grid = detail::PointGrid::over(points, 2.0);
  nbr_.resize(centres_.size());
  op_.resize(centres_.size());
  Eigen::MatrixXd A(k, p);
  Eigen::VectorXd w(k);
  for (size_t r = 0; r < centres_.size(); ++r) {
    const Vec2& c = points[static_cast<size_t>(centres_[r])];
    const auto near = grid.nearest(c, k);
    const double rad = near.back().first;
    nbr_[r].resize(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
      const int id = near[i].second;
      nbr_[r][i] = id;
      const Vec2 d = (points[static_cast<size_t>(id)] - c) / rad;
      w[i] = std::exp(-d.squaredNorm());
      for (int j = 0; j < p; ++j)
        A(i, j) = w[i] * std::pow(d.x(), exps_[j][0]) * std::pow(d.y(), exps_[j][1]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    Eigen::VectorXd sinv(s.size());
    const double cut = 1e-12 * s[0];
    for (int j = 0; j < s.size(); ++j) sinv[j] = s[j] > cut ? 1.0 / s[j] : 0.0;
    Eigen::MatrixXd pinv = svd.matrixV() * sinv.asDiagonal() * svd.matrixU().transpose();
    for (int i = 0; i < k; ++i) pinv.col(i) *= w[i];
    for (int j = 0; j < p; ++j)
      pinv.row(j) *= factorial(exps_[j][0]) * factorial(exps_[j][1]) / std::pow(rad, exps_[j][0] + exps_[j][1]);
    op_[r] = std::move(pinv);
  }
}

int LocalFit::column(int a, int c) const {
  for (size_t j = 0; j < exps_.size(); ++j)
    if (exps_[j][0] == a && exps_[j][1] == c) return static_cast<int>(j);
  throw ValidationError("derivative order exceeds the fit degree");
}

Eigen::MatrixXd LocalFit::derivatives(const Field& values) const {
  const int p = static_cast<int>(exps_.size());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(centres_.size()), p);
  Eigen::VectorXd v;
  for (size_t r = 0; r < centres_.size(); ++r) {
    const auto& nb = nbr_[r];
    v.resize(static_cast<Eigen::Index>(nb.size()));
    for (size_t i = 0; i < nb.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[nb[i]];
    out.row(static_cast<Eigen::Index>(r)) = (op_[r] * v).transpose();
  }
  return out;
}

}  // namespace elab
