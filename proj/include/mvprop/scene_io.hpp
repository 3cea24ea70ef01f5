#pragma once

#include "mvprop/types.hpp"

namespace mvp {

/// One registered RGB-D view: pose (camera-to-world) plus its depth map.
struct CameraFrame {
  std::string id;
  Pose pose;
  DepthMap depth;
  std::string depth_file;
  std::string rgb_file;
};

struct Scene {
  Intrinsics intrinsics;
  std::vector<CameraFrame> frames;
};

/// Scene JSON: {"intrinsics": {fx,fy,cx,cy,width,height},
///              "frames": [{"id","rotation":[9],"translation":[3],
///                          "depth_file","rgb_file"?}]}.
/// Depth files resolve relative to the JSON's directory.
Scene load_scene(const std::string& json_path, bool load_depth = true);
void save_scene(const Scene& scene, const std::string& json_path);

/// Per-frame 2D boxes, same schema for proposals and ground truth:
/// {"frames": [{"id","boxes":[{xmin,ymin,xmax,ymax,label?,proposal_index?}]}]}
struct FrameBoxEntry {
  Box2D box;
  int proposal_index = -1;  // -1 when absent
};

struct FrameBoxes {
  std::string frame_id;
  std::vector<FrameBoxEntry> boxes;
};

std::vector<FrameBoxes> load_boxes(const std::string& json_path);
void save_boxes(const std::vector<FrameBoxes>& frames, const std::string& json_path);

}  // namespace mvp
