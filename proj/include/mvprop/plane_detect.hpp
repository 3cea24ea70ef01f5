#pragma once

#include "mvprop/types.hpp"

namespace mvp {

/// Plane n . p = rho with unit normal; canonical form has rho >= 0.
struct PlaneModel {
  Vec3 normal = Vec3::UnitZ();
  double rho = 0;                   // meters
  std::vector<int> inlier_indices;  // indices into the cloud the plane was detected on

  int inlier_count() const { return static_cast<int>(inlier_indices.size()); }
  double distance(const Vec3& p) const { return std::abs(normal.dot(p) - rho); }
};

struct HoughParams {
  int theta_bins = 90;    // polar angle over [0, pi/2]
  int phi_bins = 180;     // azimuth over [0, 2*pi)
  double rho_resolution = 0.02;   // meters
  double inlier_threshold = 0.01; // meters, point-to-plane
  int min_inliers = 0;            // 0 = auto: 0.5% of the cloud
  int max_planes = 64;
  size_t vote_budget = 200000;    // uniform subsample cap for voting
  uint64_t subsample_seed = 7;

  void validate() const;
};

/// Iterative 3D Hough detection: vote, take the accumulator peak,
/// least-squares refine over points within inlier_threshold, remove the
/// inliers and repeat. Output sorted by inlier count descending, ties by
/// smaller rho then lexicographic normal. Throws ValidationError on an
/// empty cloud.
std::vector<PlaneModel> detect_planes(const PointCloud& cloud, const HoughParams& params);

/// Removes the inliers of the top max(1, round(fraction * |planes|)) planes
/// (half-away-from-zero rounding). `kept_indices`, when given, receives the
/// original index of each surviving point.
PointCloud remove_planes(const PointCloud& cloud, const std::vector<PlaneModel>& planes,
                         double fraction, std::vector<int>* kept_indices = nullptr);

}  // namespace mvp
