#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Input that violates a documented precondition (bad config, bad pose, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed file contents; message carries the offending line when known.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Rgb {
  uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Rgb> colors;  // empty or same length as points
  std::string source_frame;

  size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_colors() const { return !colors.empty(); }
};

/// Rigid transform mapping camera-frame coordinates to world-frame coordinates.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Pose inverse() const {
    Pose inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(rotation.transpose() * translation);
    return inv;
  }
  static Pose identity() { return Pose{}; }

  /// Throws ValidationError unless rotation is orthonormal with det +1
  /// within 1e-6.
  void validate() const;
};

struct Intrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;

  void validate() const;
};

/// Depth in integer millimeters, 0 = invalid.
struct DepthMap {
  int width = 0, height = 0;
  std::vector<uint16_t> values;  // row-major, width * height

  uint16_t at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
  uint16_t& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
};

struct Box2D {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
  std::string label;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
};

}  // namespace mvp
