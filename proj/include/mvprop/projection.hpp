#pragma once

#include "mvprop/proposals.hpp"
#include "mvprop/scene_io.hpp"

namespace mvp {

/// Labeled world-frame point set for one annotated object.
struct ObjectSegment {
  std::string label;
  PointCloud points;
};

struct VisibilityParams {
  double depth_tolerance = 0.03;  // meters of slack in the occlusion test
  int min_visible_points = 50;
  double min_box_side = 10;       // pixels

  void validate() const;
};

/// Projects the points into the frame; a point is visible when it lands
/// inside the image with positive depth and is not occluded by the frame's
/// depth map (a missing depth pixel counts as visible). Returns the clipped
/// bounding box of the visible pixels, or nullopt when fewer than
/// min_visible_points are visible or a side falls under min_box_side.
std::optional<Box2D> project_points_to_box(const PointCloud& points, const Intrinsics& intr,
                                           const CameraFrame& frame, const VisibilityParams& vis);

std::optional<Box2D> project_points_to_box(const PointCloud& cloud, std::span<const int> indices,
                                           const Intrinsics& intr, const CameraFrame& frame,
                                           const VisibilityParams& vis);

/// Per-frame boxes for every proposal; near-duplicate boxes in a frame
/// (2D IoU > 0.95) collapse to the first. proposal_index records provenance.
std::vector<FrameBoxes> project_proposals(const std::vector<Proposal3D>& proposals,
                                          const PointCloud& cloud, const Scene& scene,
                                          const VisibilityParams& vis);

/// Ground-truth boxes: one labeled box per segment per frame in which it is
/// visible.
std::vector<FrameBoxes> project_annotations(const std::vector<ObjectSegment>& segments,
                                            const Scene& scene, const VisibilityParams& vis);

}  // namespace mvp
