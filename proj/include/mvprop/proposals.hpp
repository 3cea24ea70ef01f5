#pragma once

#include "mvprop/cuboid.hpp"
#include "mvprop/plane_detect.hpp"
#include "mvprop/scene_io.hpp"

namespace mvp {

struct Proposal3D {
  Cuboid3D cuboid;
  std::vector<int> point_indices;  // into the source cloud, points inside the cuboid
  double plane_fraction = 0;       // provenance
  double radius = 0;               // provenance
  double objective = 0;            // volume / included points
};

struct ProposalParams {
  std::vector<double> radii = {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> plane_fractions = {0.50, 0.33, 0.25, 0.15, 0.10};
  double coverage = 0.9;
  int min_cluster_size = 50;
  double merge_iou3d = 0.7;
  int max_seeds = 20000;

  void validate() const;
};

/// The fraction x radius sweep over plane-filtered clouds: mean shift each
/// filtered cloud, fit a cuboid per surviving cluster, pool everything and
/// greedily drop proposals overlapping a better (lower objective) one by 3D
/// IoU above merge_iou3d. Point indices refer to `world_cloud`.
std::vector<Proposal3D> generate_proposals_multiview(const PointCloud& world_cloud,
                                                     const std::vector<PlaneModel>& planes,
                                                     const ProposalParams& params);

/// Same sweep on one frame's back-projected cloud (camera frame). Plane
/// detection runs on that cloud with `hough`. Returns the camera-frame cloud
/// through `out_cloud` when requested so callers can project the proposals.
std::vector<Proposal3D> generate_proposals_singleview(const CameraFrame& frame,
                                                      const Intrinsics& intrinsics,
                                                      const HoughParams& hough,
                                                      const ProposalParams& params,
                                                      double voxel_size = 0.0,
                                                      PointCloud* out_cloud = nullptr);

}  // namespace mvp
