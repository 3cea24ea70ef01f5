#include "mvprop/projection.hpp"

#include "mvprop/camera.hpp"
#include "mvprop/evaluation.hpp"
#include "mvprop/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace mvp {

void VisibilityParams::validate() const {
  if (!(depth_tolerance > 0)) throw ValidationError("visibility: depth_tolerance must be positive");
  if (min_visible_points <= 0) {
    throw ValidationError("visibility: min_visible_points must be positive");
  }
  if (!(min_box_side > 0)) throw ValidationError("visibility: min_box_side must be positive");
}

namespace {

std::optional<Box2D> box_from_points(const auto& point_at, size_t n_points, const Intrinsics& intr,
                                     const CameraFrame& frame, const VisibilityParams& vis) {
  double umin = 0, vmin = 0, umax = 0, vmax = 0;
  int visible = 0;
  for (size_t k = 0; k < n_points; ++k) {
    const auto proj = project_point(intr, frame.pose, point_at(k));
    if (!proj) continue;
    const int px = static_cast<int>(std::floor(proj->u));
    const int py = static_cast<int>(std::floor(proj->v));
    if (px < 0 || px >= intr.width || py < 0 || py >= intr.height) continue;
    if (!frame.depth.values.empty()) {
      const uint16_t mm = frame.depth.at(px, py);
      // A missing depth pixel counts as visible.
      if (mm != 0 && proj->depth > mm * 1e-3 + vis.depth_tolerance) continue;
    }
    if (visible == 0) {
      umin = umax = proj->u;
      vmin = vmax = proj->v;
    } else {
      umin = std::min(umin, proj->u);
      umax = std::max(umax, proj->u);
      vmin = std::min(vmin, proj->v);
      vmax = std::max(vmax, proj->v);
    }
    ++visible;
  }
  if (visible < vis.min_visible_points) return std::nullopt;
  Box2D box;
  box.xmin = std::max(0.0, umin);
  box.ymin = std::max(0.0, vmin);
  box.xmax = std::min(static_cast<double>(intr.width), umax);
  box.ymax = std::min(static_cast<double>(intr.height), vmax);
  if (box.width() < vis.min_box_side || box.height() < vis.min_box_side) return std::nullopt;
  return box;
}

}  // namespace

std::optional<Box2D> project_points_to_box(const PointCloud& points, const Intrinsics& intr,
                                           const CameraFrame& frame, const VisibilityParams& vis) {
  vis.validate();
  return box_from_points([&](size_t k) -> const Vec3& { return points.points[k]; },
                         points.size(), intr, frame, vis);
}

std::optional<Box2D> project_points_to_box(const PointCloud& cloud, std::span<const int> indices,
                                           const Intrinsics& intr, const CameraFrame& frame,
                                           const VisibilityParams& vis) {
  vis.validate();
  return box_from_points([&](size_t k) -> const Vec3& { return cloud.points[indices[k]]; },
                         indices.size(), intr, frame, vis);
}

std::vector<FrameBoxes> project_proposals(const std::vector<Proposal3D>& proposals,
                                          const PointCloud& cloud, const Scene& scene,
                                          const VisibilityParams& vis) {
  vis.validate();
  for (const auto& prop : proposals) {
    for (int i : prop.point_indices) {
      if (i < 0 || static_cast<size_t>(i) >= cloud.size()) {
        throw ValidationError("project_proposals: point index out of range");
      }
    }
  }
  std::vector<FrameBoxes> out(scene.frames.size());
  parallel_for(scene.frames.size(), [&](size_t f) {
    const CameraFrame& frame = scene.frames[f];
    out[f].frame_id = frame.id;
    for (size_t p = 0; p < proposals.size(); ++p) {
      const auto box =
          project_points_to_box(cloud, proposals[p].point_indices, scene.intrinsics, frame, vis);
      if (!box) continue;
      // Near-duplicates within a frame collapse to the first occurrence.
      bool dup = false;
      for (const auto& existing : out[f].boxes) {
        if (iou_2d(existing.box, *box) > 0.95) {
          dup = true;
          break;
        }
      }
      if (dup) continue;
      FrameBoxEntry entry;
      entry.box = *box;
      entry.proposal_index = static_cast<int>(p);
      out[f].boxes.push_back(std::move(entry));
    }
  });
  return out;
}

std::vector<FrameBoxes> project_annotations(const std::vector<ObjectSegment>& segments,
                                            const Scene& scene, const VisibilityParams& vis) {
  vis.validate();
  for (const auto& seg : segments) {
    if (seg.label.empty()) throw ValidationError("project_annotations: unlabeled segment");
    if (seg.points.empty()) throw ValidationError("project_annotations: empty segment");
  }
  std::vector<FrameBoxes> out(scene.frames.size());
  parallel_for(scene.frames.size(), [&](size_t f) {
    const CameraFrame& frame = scene.frames[f];
    out[f].frame_id = frame.id;
    for (const ObjectSegment& seg : segments) {
      auto box = project_points_to_box(seg.points, scene.intrinsics, frame, vis);
      if (!box) continue;
      box->label = seg.label;
      out[f].boxes.push_back({*box, -1});
    }
  });
  return out;
}

}  // namespace mvp
