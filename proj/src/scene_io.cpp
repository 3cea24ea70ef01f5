#include "mvprop/scene_io.hpp"

#include "mvprop/pgm_io.hpp"
#include "json_util.hpp"

namespace mvp {

using detail::json;

namespace {

Pose pose_from_json(const json& jf, const std::string& ctx) {
  const auto& jr = detail::require(jf, "rotation", ctx);
  const auto& jt = detail::require(jf, "translation", ctx);
  if (!jr.is_array() || jr.size() != 9) throw ParseError(ctx + ": rotation must be 9 numbers");
  if (!jt.is_array() || jt.size() != 3) throw ParseError(ctx + ": translation must be 3 numbers");
  Pose pose;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) pose.rotation(r, c) = jr[3 * r + c].get<double>();
  }
  for (int k = 0; k < 3; ++k) pose.translation[k] = jt[k].get<double>();
  return pose;
}

json pose_to_json(const Pose& pose) {
  json jf;
  json jr = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) jr.push_back(pose.rotation(r, c));
  }
  jf["rotation"] = jr;
  jf["translation"] = {pose.translation.x(), pose.translation.y(), pose.translation.z()};
  return jf;
}

}  // namespace

Scene load_scene(const std::string& json_path, bool load_depth) {
  const json j = detail::load_json(json_path);
  const std::filesystem::path base = std::filesystem::path(json_path).parent_path();
  Scene scene;
  const auto& ji = detail::require(j, "intrinsics", json_path);
  scene.intrinsics.fx = detail::require(ji, "fx", json_path).get<double>();
  scene.intrinsics.fy = detail::require(ji, "fy", json_path).get<double>();
  scene.intrinsics.cx = detail::require(ji, "cx", json_path).get<double>();
  scene.intrinsics.cy = detail::require(ji, "cy", json_path).get<double>();
  scene.intrinsics.width = detail::require(ji, "width", json_path).get<int>();
  scene.intrinsics.height = detail::require(ji, "height", json_path).get<int>();
  scene.intrinsics.validate();

  for (const auto& jf : detail::require(j, "frames", json_path)) {
    CameraFrame frame;
    frame.id = detail::require(jf, "id", json_path).get<std::string>();
    const std::string ctx = json_path + " frame '" + frame.id + "'";
    frame.pose = pose_from_json(jf, ctx);
    try {
      frame.pose.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(ctx + ": " + e.what());
    }
    frame.depth_file = detail::require(jf, "depth_file", ctx).get<std::string>();
    if (jf.contains("rgb_file")) frame.rgb_file = jf["rgb_file"].get<std::string>();
    if (load_depth) {
      frame.depth = load_depth_pgm((base / frame.depth_file).string());
    }
    scene.frames.push_back(std::move(frame));
  }
  return scene;
}

void save_scene(const Scene& scene, const std::string& json_path) {
  json j;
  j["intrinsics"] = {{"fx", scene.intrinsics.fx}, {"fy", scene.intrinsics.fy},
                     {"cx", scene.intrinsics.cx}, {"cy", scene.intrinsics.cy},
                     {"width", scene.intrinsics.width}, {"height", scene.intrinsics.height}};
  json jframes = json::array();
  for (const CameraFrame& frame : scene.frames) {
    json jf = pose_to_json(frame.pose);
    jf["id"] = frame.id;
    jf["depth_file"] = frame.depth_file;
    if (!frame.rgb_file.empty()) jf["rgb_file"] = frame.rgb_file;
    jframes.push_back(std::move(jf));
  }
  j["frames"] = std::move(jframes);
  detail::save_json(j, json_path);
}

std::vector<FrameBoxes> load_boxes(const std::string& json_path) {
  const json j = detail::load_json(json_path);
  std::vector<FrameBoxes> out;
  for (const auto& jf : detail::require(j, "frames", json_path)) {
    FrameBoxes fb;
    fb.frame_id = detail::require(jf, "id", json_path).get<std::string>();
    for (const auto& jb : detail::require(jf, "boxes", json_path)) {
      FrameBoxEntry entry;
      entry.box.xmin = detail::require(jb, "xmin", json_path).get<double>();
      entry.box.ymin = detail::require(jb, "ymin", json_path).get<double>();
      entry.box.xmax = detail::require(jb, "xmax", json_path).get<double>();
      entry.box.ymax = detail::require(jb, "ymax", json_path).get<double>();
      if (entry.box.xmin > entry.box.xmax || entry.box.ymin > entry.box.ymax) {
        throw ParseError(json_path + ": inverted box in frame '" + fb.frame_id + "'");
      }
      if (jb.contains("label")) entry.box.label = jb["label"].get<std::string>();
      if (jb.contains("proposal_index")) entry.proposal_index = jb["proposal_index"].get<int>();
      fb.boxes.push_back(std::move(entry));
    }
    out.push_back(std::move(fb));
  }
  return out;
}

void save_boxes(const std::vector<FrameBoxes>& frames, const std::string& json_path) {
  json jframes = json::array();
  for (const FrameBoxes& fb : frames) {
    json jboxes = json::array();
    for (const FrameBoxEntry& entry : fb.boxes) {
      json jb = {{"xmin", entry.box.xmin}, {"ymin", entry.box.ymin},
                 {"xmax", entry.box.xmax}, {"ymax", entry.box.ymax}};
      if (!entry.box.label.empty()) jb["label"] = entry.box.label;
      if (entry.proposal_index >= 0) jb["proposal_index"] = entry.proposal_index;
      jboxes.push_back(std::move(jb));
    }
    jframes.push_back(json{{"id", fb.frame_id}, {"boxes", std::move(jboxes)}});
  }
  detail::save_json(json{{"frames", std::move(jframes)}}, json_path);
}

}  // namespace mvp
