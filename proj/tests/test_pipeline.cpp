#include "mvprop/pipeline.hpp"

#include "mvprop/synth.hpp"
#include "test_helpers.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace mvp;
using mvp::testing::TempDir;

namespace {

// Small but complete scene: floor + shelf + two objects, four views.
void write_small_scene(const std::string& dir, double alpha = 2.0) {
  SceneSpec spec;
  spec.intrinsics = {180, 180, 80, 60, 160, 120};
  spec.depth_noise_sigma = 0.003;
  spec.scale_alpha = alpha;
  spec.planes.push_back({Vec3(0, 0, 1), 0.0, Vec3(0, 0, 0), 1.4, 1.1});
  spec.planes.push_back({Vec3(0, -1, 0), -1.0, Vec3(0, 1.0, 0.4), 1.4, 0.4});
  spec.objects.push_back({"crate", ShapeKind::Box, Vec3(-0.5, 0, 0.11), Vec3(0.26, 0.2, 0.22)});
  spec.objects.push_back({"tube", ShapeKind::Cylinder, Vec3(0.5, 0.2, 0.12), Vec3(0.09, 0.09, 0.24)});
  for (int f = 0; f < 4; ++f) {
    const double ang = std::numbers::pi * (0.25 + 0.17 * f);
    spec.cameras.push_back(mvp::testing::look_at(
        Vec3(1.9 * std::cos(ang), -1.9 * std::abs(std::sin(ang)), 1.6), Vec3(0, 0, 0.1)));
  }
  const SceneTruth truth = generate_scene(spec, 31);
  write_scene_dir(spec, truth, dir);
}

std::string small_config_json(const std::string& scene_dir, const std::string& out_dir) {
  return std::string("{") +
         "\"scene\": \"" + scene_dir + "/scene.json\"," +
         "\"correspondences\": \"" + scene_dir + "/correspondences.csv\"," +
         "\"gt_boxes\": \"" + scene_dir + "/gt_boxes.json\"," +
         "\"output_dir\": \"" + out_dir + "\"," +
         "\"hough\": {\"inlier_threshold\": 0.012, \"min_inliers\": 800}," +
         "\"proposal\": {\"radii\": [0.3, 0.4], \"min_cluster_size\": 40}" +
         "}";
}

}  // namespace

TEST_CASE("config: defaults layer, overrides, validation") {
  const std::string text = R"({
    "defaults": {"seed": 7, "proposal": {"coverage": 0.8}},
    "seed": 9,
    "output_dir": "/tmp/x"
  })";
  PipelineConfig cfg = config_from_json_text(text);
  CHECK(cfg.seed == 9);                     // top level beats defaults
  CHECK(cfg.proposal.coverage == 0.8);      // defaults fill the rest
  CHECK(cfg.proposal.radii.size() == 8);    // untouched built-ins

  cfg = config_from_json_text(text, {"proposal.coverage=0.95", "threads=2"});
  CHECK(cfg.proposal.coverage == 0.95);
  CHECK(cfg.threads == 2);

  CHECK_THROWS_AS(config_from_json_text(text, {"no_equals_sign"}), ValidationError);
  CHECK_THROWS_AS(config_from_json_text("[1,2]"), ParseError);

  // Empty radii must fail validation before any stage could run.
  const PipelineConfig bad = config_from_json_text(text, {"proposal.radii=[]"});
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK_THROWS_AS(run_multiview(bad), ValidationError);
}

TEST_CASE("proposal list serialization round-trips") {
  TempDir tmp("props");
  std::vector<Proposal3D> proposals(2);
  proposals[0].cuboid = {{0, 0, 0}, {1, 2, 3}};
  proposals[0].point_indices = {3, 1, 4, 1, 5};
  proposals[0].plane_fraction = 0.33;
  proposals[0].radius = 0.5;
  proposals[0].objective = 0.125;
  proposals[1].cuboid = {{-1, -1, -1}, {0, 0, 0}};
  save_proposals(proposals, tmp.file("p.json"));
  const auto back = load_proposals(tmp.file("p.json"));
  REQUIRE(back.size() == 2);
  CHECK(back[0].cuboid.max_corner == Vec3(1, 2, 3));
  CHECK(back[0].point_indices == proposals[0].point_indices);
  CHECK(back[0].plane_fraction == 0.33);
  CHECK(back[0].objective == 0.125);
}

TEST_CASE("hashing: FNV-1a known value and file equality") {
  // FNV-1a 64 of "a" is a published constant.
  CHECK(hash_bytes("a", 1) == 0xaf63dc4c8601ec8cull);
  CHECK(hash_bytes("", 0) == 14695981039346656037ull);

  TempDir tmp("hash");
  {
    std::ofstream out(tmp.file("f.bin"), std::ios::binary);
    out << "some bytes";
  }
  CHECK(hash_file(tmp.file("f.bin")) == hash_bytes("some bytes", 10));
  CHECK_THROWS_AS(hash_file(tmp.file("missing.bin")), ParseError);
}

TEST_CASE("run_multiview: full artifact set, manifest and recall") {
  TempDir scene("scene"), out("out");
  write_small_scene(scene.str());
  const PipelineConfig cfg = config_from_json_text(small_config_json(scene.str(), out.str()));
  run_multiview(cfg);

  for (const char* name : {"world.ply", "fuse_report.json", "planes.json", "proposals.json",
                           "proposal_boxes.json", "recall.json", "recall.csv", "manifest.json"}) {
    CHECK_MESSAGE(std::filesystem::exists(out.file(name)), "missing ", name);
  }

  const auto manifest = nlohmann::json::parse(std::ifstream(out.file("manifest.json")));
  CHECK(manifest.at("flow") == "multiview");
  // Every artifact is listed with a content hash that matches the file.
  for (const auto& art : manifest.at("artifacts")) {
    const uint64_t h = hash_file(out.file(art.at("file").get<std::string>()));
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    CHECK(art.at("hash").get<std::string>() == hex);
  }
  CHECK(manifest.at("stages").size() == 5);

  const auto fuse = nlohmann::json::parse(std::ifstream(out.file("fuse_report.json")));
  CHECK(std::abs(fuse.at("alpha").get<double>() - 2.0) < 1e-6);

  const auto recall = nlohmann::json::parse(std::ifstream(out.file("recall.json")));
  CHECK(recall.at("classes").size() == 2);
  CHECK(recall.at("average_recall").get<double>() > 0.5);
}

TEST_CASE("run_multiview: stage failure leaves a .partial marker and StageError") {
  TempDir out("out");
  PipelineConfig cfg = config_from_json_text(
      "{\"scene\": \"/nonexistent/scene.json\", \"correspondences\": \"/nonexistent/c.csv\","
      "\"output_dir\": \"" + out.str() + "\"}");
  CHECK_THROWS_AS(run_multiview(cfg), StageError);
  CHECK(std::filesystem::exists(out.file("fuse.partial")));
  CHECK_FALSE(std::filesystem::exists(out.file("manifest.json")));
}

TEST_CASE("run_singleview: artifacts and evaluation against the same gt") {
  TempDir scene("scene"), out("out");
  write_small_scene(scene.str(), /*alpha=*/1.0);
  PipelineConfig cfg = config_from_json_text(small_config_json(scene.str(), out.str()));
  run_singleview(cfg);
  for (const char* name :
       {"sv_proposals.json", "proposal_boxes.json", "recall.json", "recall.csv", "manifest.json"}) {
    CHECK_MESSAGE(std::filesystem::exists(out.file(name)), "missing ", name);
  }
  const auto manifest = nlohmann::json::parse(std::ifstream(out.file("manifest.json")));
  CHECK(manifest.at("flow") == "singleview");
}

TEST_CASE("run_singleview: zero frames is an empty report, not an error") {
  TempDir tmp("empty"), out("out");
  {
    std::ofstream s(tmp.file("scene.json"));
    s << R"({"intrinsics": {"fx":100,"fy":100,"cx":50,"cy":50,"width":100,"height":100},
             "frames": []})";
  }
  const PipelineConfig cfg = config_from_json_text(
      "{\"scene\": \"" + tmp.file("scene.json") + "\", \"output_dir\": \"" + out.str() + "\"}");
  CHECK_NOTHROW(run_singleview(cfg));
  const auto recall = nlohmann::json::parse(std::ifstream(out.file("recall.json")));
  CHECK(recall.at("classes").empty());
  const auto boxes = load_boxes(out.file("proposal_boxes.json"));
  CHECK(boxes.empty());
}

TEST_CASE("stage_eval: AP report from a detections file") {
  TempDir tmp("eval");
  // gt and proposal boxes share one frame.
  {
    std::ofstream gt(tmp.file("gt.json"));
    gt << R"({"frames":[{"id":"f0","boxes":[{"xmin":0,"ymin":0,"xmax":10,"ymax":10,"label":"mug"}]}]})";
    std::ofstream props(tmp.file("props.json"));
    props << R"({"frames":[{"id":"f0","boxes":[{"xmin":0,"ymin":0,"xmax":10,"ymax":10}]}]})";
    std::ofstream dets(tmp.file("dets.json"));
    dets << R"({"detections":[{"frame_id":"f0","xmin":0,"ymin":0,"xmax":10,"ymax":10,
                               "label":"mug","score":0.9}]})";
  }
  PipelineConfig cfg;
  stage_eval(tmp.file("props.json"), tmp.file("gt.json"), tmp.file("dets.json"), cfg,
             tmp.file("report"));
  const auto rep = nlohmann::json::parse(std::ifstream(tmp.file("report.json")));
  CHECK(rep.at("recall")[0][0].get<double>() == 1.0);
  const auto ap = nlohmann::json::parse(std::ifstream(tmp.file("report_ap.json")));
  CHECK(ap.at("per_class").at("mug").get<double>() == 1.0);
  CHECK(ap.at("mAP").get<double>() == 1.0);
  // CSV header row carries the threshold grid.
  std::ifstream csv(tmp.file("report.csv"));
  std::string header;
  std::getline(csv, header);
  CHECK(header.rfind("class,0.5", 0) == 0);
}
