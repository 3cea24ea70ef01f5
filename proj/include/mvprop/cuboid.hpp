#pragma once

#include "mvprop/mean_shift.hpp"
#include "mvprop/types.hpp"

#include <span>

namespace mvp {

struct Cuboid3D {
  Vec3 min_corner = Vec3::Zero();
  Vec3 max_corner = Vec3::Zero();

  double volume() const {
    const Vec3 d = max_corner - min_corner;
    return d.x() * d.y() * d.z();
  }
  bool contains(const Vec3& p) const {  // closed bounds
    return p.x() >= min_corner.x() && p.x() <= max_corner.x() &&
           p.y() >= min_corner.y() && p.y() <= max_corner.y() &&
           p.z() >= min_corner.z() && p.z() <= max_corner.z();
  }
};

/// Axis-aligned intersection-over-union of cuboid volumes.
double iou_3d(const Cuboid3D& a, const Cuboid3D& b);

/// Outlier-rejecting cuboid fit by pattern search over center shift and
/// extent change, minimizing volume / included-point-count subject to
/// included >= ceil(coverage * n). Initial step is 10% of each AABB extent,
/// halved on failure to improve; stops below 1e-4 m. Ties within 1e-9
/// relative objective go to the candidate with more included points. The
/// result is snapped to the tight AABB of its included set.
Cuboid3D fit_cuboid(const PointCloud& cloud, std::span<const int> indices, double coverage);

/// Count of cluster points inside the cuboid (closed bounds).
int count_inside(const PointCloud& cloud, std::span<const int> indices, const Cuboid3D& box);

}  // namespace mvp
