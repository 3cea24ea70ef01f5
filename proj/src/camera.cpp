#include "mvprop/camera.hpp"

#include <cmath>

namespace mvp {

void Pose::validate() const {
  const Mat3 err = rotation.transpose() * rotation - Mat3::Identity();
  if (err.cwiseAbs().maxCoeff() > 1e-6) {
    throw ValidationError("pose rotation is not orthonormal");
  }
  if (std::abs(rotation.determinant() - 1.0) > 1e-6) {
    throw ValidationError("pose rotation determinant is not +1");
  }
  if (!translation.allFinite()) throw ValidationError("pose translation is not finite");
}

void Intrinsics::validate() const {
  if (!(fx > 0) || !(fy > 0)) throw ValidationError("intrinsics: focal lengths must be positive");
  if (width <= 0 || height <= 0) throw ValidationError("intrinsics: image size must be positive");
  if (!std::isfinite(cx) || !std::isfinite(cy)) {
    throw ValidationError("intrinsics: principal point is not finite");
  }
}

std::optional<Projection> project_point(const Intrinsics& intr, const Pose& pose, const Vec3& p) {
  // pose maps camera -> world; invert for projection.
  const Vec3 pc = pose.rotation.transpose() * (p - pose.translation);
  if (!(pc.z() > 0)) return std::nullopt;
  Projection out;
  out.u = intr.fx * pc.x() / pc.z() + intr.cx;
  out.v = intr.fy * pc.y() / pc.z() + intr.cy;
  out.depth = pc.z();
  return out;
}

PointCloud backproject_depth(const Intrinsics& intr, const DepthMap& depth) {
  if (depth.width != intr.width || depth.height != intr.height) {
    throw ValidationError("depth map size does not match intrinsics");
  }
  PointCloud cloud;
  for (int y = 0; y < depth.height; ++y) {
    for (int x = 0; x < depth.width; ++x) {
      const uint16_t mm = depth.at(x, y);
      if (mm == 0) continue;
      const double z = mm * 1e-3;
      cloud.points.emplace_back((x - intr.cx) * z / intr.fx, (y - intr.cy) * z / intr.fy, z);
    }
  }
  return cloud;
}

PointCloud transform_cloud(const PointCloud& cloud, const Pose& pose) {
  pose.validate();
  PointCloud out;
  out.colors = cloud.colors;
  out.source_frame = cloud.source_frame;
  out.points.reserve(cloud.points.size());
  for (const Vec3& p : cloud.points) out.points.push_back(pose.apply(p));
  return out;
}

}  // namespace mvp
