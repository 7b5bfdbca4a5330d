#pragma once

// Uniform-grid point index used for proximity queries and k-nearest lookups.

#include "entropylab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace elab::detail {

class PointGrid {
 public:
  PointGrid(Vec2 lo, Vec2 hi, double cell) : lo_(lo), cell_(cell) {
    nx_ = std::max(1L, static_cast<long>((hi.x() - lo.x()) / cell) + 1);
    ny_ = std::max(1L, static_cast<long>((hi.y() - lo.y()) / cell) + 1);
    buckets_.resize(static_cast<size_t>(nx_ * ny_));
  }

  // Grid over a point set with roughly `per_cell` points per cell.
  static PointGrid over(const std::vector<Vec2>& pts, double per_cell = 2.0) {
    Vec2 lo = pts.front(), hi = pts.front();
    for (const auto& p : pts) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const Vec2 ext = hi - lo;
    const double area = std::max(ext.x() * ext.y(), 1e-300);
    double cell = std::sqrt(per_cell * area / static_cast<double>(pts.size()));
    cell = std::max(cell, 1e-9 * std::max(ext.x(), ext.y()) + 1e-300);
    PointGrid g(lo, hi, cell);
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) g.insert(i, pts[i]);
    g.pts_ = &pts;
    return g;
  }

  void insert(int id, const Vec2& p) { buckets_[key(cx(p.x()), cy(p.y()))].emplace_back(id, p); }

  // True when some stored point lies strictly within `radius` of p.
  bool any_within(const Vec2& p, double radius) const {
    const long r = static_cast<long>(std::ceil(radius / cell_));
    const long x0 = cx(p.x()), y0 = cy(p.y());
    const double r2 = radius * radius;
    for (long gx = std::max(0L, x0 - r); gx <= std::min(nx_ - 1, x0 + r); ++gx)
      for (long gy = std::max(0L, y0 - r); gy <= std::min(ny_ - 1, y0 + r); ++gy)
        for (const auto& e : buckets_[key(gx, gy)])
          if ((e.second - p).squaredNorm() < r2) return true;
    return false;
  }

  // Indices of the k nearest stored points to p (including p itself if stored),
  // sorted by distance, ties broken by index.
  std::vector<std::pair<double, int>> nearest(const Vec2& p, int k) const {
    std::vector<std::pair<double, int>> found;
    const long x0 = cx(p.x()), y0 = cy(p.y());
    const long rmax = std::max(nx_, ny_);
    for (long ring = 0; ring <= rmax; ++ring) {
      for (long gx = x0 - ring; gx <= x0 + ring; ++gx) {
        for (long gy = y0 - ring; gy <= y0 + ring; ++gy) {
          if (std::max(std::abs(gx - x0), std::abs(gy - y0)) != ring) continue;
          if (gx < 0 || gy < 0 || gx >= nx_ || gy >= ny_) continue;
          for (const auto& e : buckets_[key(gx, gy)]) found.emplace_back((e.second - p).norm(), e.first);
        }
      }
      if (static_cast<int>(found.size()) >= k) {
        std::sort(found.begin(), found.end());
        // every point outside the searched square is farther than ring·cell
        if (found[k - 1].first <= ring * cell_) break;
      }
    }
    std::sort(found.begin(), found.end());
    if (static_cast<int>(found.size()) > k) found.resize(static_cast<size_t>(k));
    return found;
  }

 private:
  long cx(double x) const { return std::clamp(static_cast<long>((x - lo_.x()) / cell_), 0L, nx_ - 1); }
  long cy(double y) const { return std::clamp(static_cast<long>((y - lo_.y()) / cell_), 0L, ny_ - 1); }
  size_t key(long gx, long gy) const { return static_cast<size_t>(gx * ny_ + gy); }

  Vec2 lo_;
  double cell_;
  long nx_ = 1, ny_ = 1;
  std::vector<std::vector<std::pair<int, Vec2>>> buckets_;
  const std::vector<Vec2>* pts_ = nullptr;
};

}  // namespace elab::detail
