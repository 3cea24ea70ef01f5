#pragma once

#include "mvprop/scene_io.hpp"
#include "mvprop/types.hpp"

namespace mvp {

/// Matched sparse-point / depth-sensor pair: SfM-unit depth vs metric depth.
struct DepthCorrespondence {
  double sfm_depth = 0;    // Z, arbitrary SfM units
  double metric_depth = 0; // z, meters
};

struct ScaleEstimate {
  double alpha = 1.0;      // metric = alpha * sfm
  size_t sample_count = 0; // correspondences surviving the percentile filter
};

struct FusionParams {
  double voxel_size = 0.005;  // meters, 0 = no downsampling
  double percentile_low = 10.0;
  double percentile_high = 90.0;
};

/// Discards pairs whose SfM depth falls outside the
/// [percentile_low, percentile_high] band (nearest-rank percentiles), then
/// takes the median of z/Z over the survivors. Throws ValidationError when
/// nothing survives.
ScaleEstimate estimate_scale(const std::vector<DepthCorrespondence>& pairs,
                             const FusionParams& params);

/// Voxel-grid reduction keeping the centroid of each occupied cell,
/// first-occupied order.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size);

/// Back-projects every frame, rescales pose translations by alpha, transforms
/// to the world frame and concatenates in frame order; optional voxel
/// reduction at the end.
PointCloud fuse_frames(const std::vector<CameraFrame>& frames, const Intrinsics& intrinsics,
                       double alpha, const FusionParams& params);

}  // namespace mvp
