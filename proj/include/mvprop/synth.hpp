#pragma once

#include "mvprop/cuboid.hpp"
#include "mvprop/projection.hpp"
#include "mvprop/scene_io.hpp"

namespace mvp {

/// Finite rectangle on the plane normal . p = rho, centered at `center` with
/// half-extents along two in-plane axes derived deterministically from the
/// normal.
struct PlaneSpec {
  Vec3 normal = Vec3::UnitZ();
  double rho = 0;
  Vec3 center = Vec3::Zero();  // must satisfy normal . center == rho
  double ext_u = 1, ext_v = 1; // half-extents, meters
};

enum class ShapeKind { Box, Cylinder };

struct ObjectSpec {
  std::string label;
  ShapeKind shape = ShapeKind::Box;
  Vec3 center = Vec3::Zero();
  // Box: full extents (x, y, z). Cylinder: size.x = radius, size.z = height,
  // axis +z.
  Vec3 size = Vec3::Ones();
};

struct SceneSpec {
  std::vector<PlaneSpec> planes;
  std::vector<ObjectSpec> objects;
  std::vector<Pose> cameras;  // camera-to-world, metric
  Intrinsics intrinsics;
  double depth_noise_sigma = 0;   // meters
  double max_depth = 0;           // meters; 0 = unlimited sensor range
  double segment_spacing = 0.005; // surface sampling step for segments
  double scale_alpha = 1.0;       // stored poses get translation / alpha
  int gt_min_pixels = 50;
  double gt_min_box_side = 10;

  void validate() const;
};

struct FrameTruth {
  DepthMap depth;
  std::vector<Box2D> gt_boxes;  // labeled, from rendered surface visibility
};

struct SceneTruth {
  std::vector<FrameTruth> frames;
  std::vector<ObjectSegment> object_segments;  // world frame, exact membership
  std::vector<ObjectSegment> plane_segments;   // labeled plane_<i>
};

/// Ray-casts every camera against planes and objects: nearest-hit depth maps
/// (mm-quantized, per-frame seeded Gaussian noise), per-frame ground-truth
/// boxes from the rendered object masks, and surface-sampled world segments.
/// Deterministic given (spec, seed).
SceneTruth generate_scene(const SceneSpec& spec, uint64_t seed);

SceneSpec load_scene_spec(const std::string& json_path);
void save_scene_spec(const SceneSpec& spec, const std::string& json_path);

/// Writes a full scene directory in the formats the pipeline consumes:
/// scene.json (poses with translations in SfM units, i.e. divided by
/// scale_alpha), depth_<id>.pgm, gt_boxes.json, segments/<label>.ply plus
/// segments/labels.json, and correspondences.csv sampled from the true
/// depths.
void write_scene_dir(const SceneSpec& spec, const SceneTruth& truth, const std::string& out_dir);

// --- brute-force oracles (test reference implementations) ---

/// Exhaustive minimum volume-per-point cuboid over per-axis coordinate faces
/// subject to the coverage constraint; |points| <= 500.
Cuboid3D oracle_cuboid(const PointCloud& points, double coverage);

/// Mean-shift update from every point to convergence at 1e-6, modes merged
/// within radius/2; |points| <= 2000.
std::vector<Vec3> oracle_modes(const PointCloud& points, double radius);

}  // namespace mvp
