#pragma once

#include "mvprop/types.hpp"

namespace mvp {

struct Cluster {
  std::vector<int> point_indices;
  Vec3 mode = Vec3::Zero();

  int size() const { return static_cast<int>(point_indices.size()); }
};

/// Flat-kernel mean shift. Every seed iterates m <- mean(points within radius
/// of m) until the displacement drops below 1e-4 m (100 iterations cap).
/// Converged modes closer than radius/2 merge into a member-weighted mean.
/// When the cloud exceeds max_seeds, seeds are a uniform 1-in-k subsample and
/// non-seed points join the nearest mode. Clusters come back sorted by size
/// descending; the assignment is a partition of the input.
std::vector<Cluster> mean_shift(const PointCloud& cloud, double radius, int max_seeds = 20000);

}  // namespace mvp
