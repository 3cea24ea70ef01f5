#pragma once

#include "mvprop/types.hpp"

namespace mvp {

struct Projection {
  double u = 0, v = 0;  // pixels
  double depth = 0;     // camera-frame depth, meters
};

/// World point -> pixel + camera-frame depth. Returns nullopt when the point
/// lies at or behind the camera; no image-bounds clipping here.
std::optional<Projection> project_point(const Intrinsics& intr, const Pose& pose, const Vec3& p);

/// One camera-frame point per valid (nonzero) depth pixel, row-major order,
/// millimeters converted to meters. Throws ValidationError on a size mismatch
/// between the depth map and the intrinsics.
PointCloud backproject_depth(const Intrinsics& intr, const DepthMap& depth);

/// p -> R * p + t for every point; colors and ordering preserved.
PointCloud transform_cloud(const PointCloud& cloud, const Pose& pose);

}  // namespace mvp
