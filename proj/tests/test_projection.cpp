#include "mvprop/projection.hpp"

#include "mvprop/camera.hpp"
#include "mvprop/evaluation.hpp"
#include "mvprop/scale.hpp"
#include "mvprop/synth.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

using namespace mvp;

namespace {

VisibilityParams loose() {
  VisibilityParams vis;
  vis.min_visible_points = 5;
  vis.min_box_side = 2;
  return vis;
}

}  // namespace

TEST_CASE("project_points_to_box: segment behind the camera gives nothing") {
  PointCloud seg;
  for (int i = 0; i < 100; ++i) seg.points.push_back(Vec3(0.01 * i, 0, -2.0));
  Intrinsics intr{200, 200, 80, 60, 160, 120};
  CameraFrame frame;  // identity pose, no depth map
  CHECK_FALSE(project_points_to_box(seg, intr, frame, loose()).has_value());
}

TEST_CASE("project_points_to_box: unoccluded box matches the rendered gt within 2 px") {
  SceneSpec spec;
  spec.intrinsics = {300, 300, 160, 120, 320, 240};
  spec.planes.push_back({Vec3(0, 0, 1), 0.0, Vec3(0, 0, 0), 1.5, 1.5});
  spec.objects.push_back({"crate", ShapeKind::Box, Vec3(0.1, -0.2, 0.15), Vec3(0.3, 0.25, 0.3)});
  spec.cameras.push_back(mvp::testing::look_at(Vec3(1.2, -1.5, 1.3), Vec3(0, 0, 0.1)));
  spec.segment_spacing = 0.004;
  const SceneTruth truth = generate_scene(spec, 9);
  REQUIRE(truth.frames[0].gt_boxes.size() == 1);
  const Box2D& gt = truth.frames[0].gt_boxes[0];

  CameraFrame frame;
  frame.pose = spec.cameras[0];
  frame.depth = truth.frames[0].depth;
  const auto box =
      project_points_to_box(truth.object_segments[0].points, spec.intrinsics, frame, loose());
  REQUIRE(box.has_value());
  CHECK(std::abs(box->xmin - gt.xmin) <= 2.0);
  CHECK(std::abs(box->ymin - gt.ymin) <= 2.0);
  CHECK(std::abs(box->xmax - gt.xmax) <= 2.0);
  CHECK(std::abs(box->ymax - gt.ymax) <= 2.0);
}

TEST_CASE("project_points_to_box: object behind a closer surface is dropped") {
  // A wall at y=0 fully hides an object at y=1 from a camera at y=-2.
  SceneSpec spec;
  spec.intrinsics = {200, 200, 80, 60, 160, 120};
  spec.planes.push_back({Vec3(0, -1, 0), 0.0, Vec3(0, 0, 0.5), 1.5, 1.5});
  spec.objects.push_back({"hidden", ShapeKind::Box, Vec3(0, 1.0, 0.5), Vec3(0.3, 0.3, 0.3)});
  spec.cameras.push_back(mvp::testing::look_at(Vec3(0, -2.0, 0.5), Vec3(0, 0, 0.5)));
  const SceneTruth truth = generate_scene(spec, 9);
  CHECK(truth.frames[0].gt_boxes.empty());  // renderer agrees: not visible

  CameraFrame frame;
  frame.pose = spec.cameras[0];
  frame.depth = truth.frames[0].depth;
  CHECK_FALSE(project_points_to_box(truth.object_segments[0].points, spec.intrinsics, frame,
                                    loose())
                  .has_value());
}

TEST_CASE("project_proposals: zero proposals give empty per-frame lists") {
  Scene scene;
  scene.intrinsics = {100, 100, 50, 50, 100, 100};
  scene.frames.resize(3);
  scene.frames[0].id = "a";
  scene.frames[1].id = "b";
  scene.frames[2].id = "c";
  const auto boxes = project_proposals({}, PointCloud{}, scene, VisibilityParams{});
  REQUIRE(boxes.size() == 3);
  for (const FrameBoxes& fb : boxes) CHECK(fb.boxes.empty());
  CHECK(boxes[1].frame_id == "b");
}

TEST_CASE("project_proposals: proposal appears exactly in the frames that see it") {
  // Two objects far apart; cameras aimed so each sees exactly one of them.
  SceneSpec spec;
  spec.intrinsics = {300, 300, 80, 60, 160, 120};
  spec.objects.push_back({"left", ShapeKind::Box, Vec3(-3, 0, 0.5), Vec3(0.4, 0.4, 0.4)});
  spec.objects.push_back({"right", ShapeKind::Box, Vec3(3, 0, 0.5), Vec3(0.4, 0.4, 0.4)});
  spec.cameras.push_back(mvp::testing::look_at(Vec3(-3, -2.5, 0.8), Vec3(-3, 0, 0.5)));
  spec.cameras.push_back(mvp::testing::look_at(Vec3(3, -2.5, 0.8), Vec3(3, 0, 0.5)));
  const SceneTruth truth = generate_scene(spec, 13);

  Scene scene;
  scene.intrinsics = spec.intrinsics;
  for (int f = 0; f < 2; ++f) {
    CameraFrame frame;
    frame.id = f == 0 ? "left_view" : "right_view";
    frame.pose = spec.cameras[f];
    frame.depth = truth.frames[f].depth;
    scene.frames.push_back(std::move(frame));
  }

  // World cloud from both segments; one proposal per object.
  PointCloud cloud = truth.object_segments[0].points;
  const size_t n_left = cloud.size();
  cloud.points.insert(cloud.points.end(), truth.object_segments[1].points.points.begin(),
                      truth.object_segments[1].points.points.end());
  std::vector<Proposal3D> proposals(2);
  for (size_t i = 0; i < n_left; ++i) proposals[0].point_indices.push_back(int(i));
  for (size_t i = n_left; i < cloud.size(); ++i) proposals[1].point_indices.push_back(int(i));

  const auto boxes = project_proposals(proposals, cloud, scene, VisibilityParams{});
  REQUIRE(boxes.size() == 2);
  REQUIRE(boxes[0].boxes.size() == 1);
  CHECK(boxes[0].boxes[0].proposal_index == 0);
  REQUIRE(boxes[1].boxes.size() == 1);
  CHECK(boxes[1].boxes[0].proposal_index == 1);
}

TEST_CASE("project_proposals: out-of-range point index is rejected") {
  Scene scene;
  scene.intrinsics = {100, 100, 50, 50, 100, 100};
  scene.frames.resize(1);
  std::vector<Proposal3D> proposals(1);
  proposals[0].point_indices = {5};
  CHECK_THROWS_AS(project_proposals(proposals, PointCloud{}, scene, VisibilityParams{}),
                  ValidationError);
}

TEST_CASE("project_annotations: every rendered-visible object gets a labeled box") {
  SceneSpec spec;
  spec.intrinsics = {220, 220, 160, 120, 320, 240};
  spec.planes.push_back({Vec3(0, 0, 1), 0.0, Vec3(0, 0, 0), 1.5, 1.5});
  spec.objects.push_back({"mug", ShapeKind::Cylinder, Vec3(-0.4, 0, 0.1), Vec3(0.06, 0.06, 0.2)});
  spec.objects.push_back({"box", ShapeKind::Box, Vec3(0.4, 0.1, 0.12), Vec3(0.25, 0.2, 0.24)});
  spec.cameras.push_back(mvp::testing::look_at(Vec3(0, -1.6, 1.4), Vec3(0, 0, 0.1)));
  const SceneTruth truth = generate_scene(spec, 17);

  Scene scene;
  scene.intrinsics = spec.intrinsics;
  CameraFrame frame;
  frame.id = "f";
  frame.pose = spec.cameras[0];
  frame.depth = truth.frames[0].depth;
  scene.frames.push_back(std::move(frame));

  VisibilityParams vis;
  vis.min_visible_points = 20;
  vis.min_box_side = 4;
  const auto annos = project_annotations(truth.object_segments, scene, vis);
  REQUIRE(annos.size() == 1);

  for (const Box2D& gt : truth.frames[0].gt_boxes) {
    bool found = false;
    for (const FrameBoxEntry& entry : annos[0].boxes) {
      if (entry.box.label == gt.label && iou_2d(entry.box, gt) > 0.5) found = true;
    }
    CHECK_MESSAGE(found, "missing annotation for ", gt.label);
  }
}

TEST_CASE("project_annotations: empty segment list and invalid segments") {
  Scene scene;
  scene.intrinsics = {100, 100, 50, 50, 100, 100};
  scene.frames.resize(2);
  const auto empty = project_annotations({}, scene, VisibilityParams{});
  REQUIRE(empty.size() == 2);
  CHECK(empty[0].boxes.empty());

  ObjectSegment unlabeled;
  unlabeled.points.points.push_back(Vec3::Zero());
  CHECK_THROWS_AS(project_annotations({unlabeled}, scene, VisibilityParams{}), ValidationError);
}

TEST_CASE("boxes clipped at image borders never have negative extent") {
  // Object partially outside the frustum.
  Intrinsics intr{100, 100, 50, 50, 100, 100};
  PointCloud seg;
  for (int i = 0; i < 200; ++i) {
    // Sheet spilling past the left image edge.
    seg.points.push_back(Vec3(-1.0 + (i % 20) * 0.12, -0.2 + (i / 20) * 0.05, 1.0));
  }
  CameraFrame frame;  // identity pose, no depth
  const auto box = project_points_to_box(seg, intr, frame, loose());
  REQUIRE(box.has_value());
  CHECK(box->xmin >= 0);
  CHECK(box->ymin >= 0);
  CHECK(box->xmax <= intr.width);
  CHECK(box->ymax <= intr.height);
  CHECK(box->width() >= 0);
  CHECK(box->height() >= 0);
}
