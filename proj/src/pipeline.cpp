#include "mvprop/pipeline.hpp"

#include "mvprop/camera.hpp"
#include "mvprop/parallel.hpp"
#include "mvprop/ply_io.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mvp {

using detail::json;
namespace fs = std::filesystem;

void PipelineConfig::validate() const {
  hough.validate();
  proposal.validate();
  visibility.validate();
  if (!(fusion.percentile_low < fusion.percentile_high)) {
    throw ValidationError("config: fusion.percentile_low must be below percentile_high");
  }
  if (fusion.voxel_size < 0) throw ValidationError("config: fusion.voxel_size must be >= 0");
  if (eval.thresholds.empty()) throw ValidationError("config: eval.thresholds must be nonempty");
  if (threads < 0) throw ValidationError("config: threads must be >= 0");
}

namespace {

json merge_defaults(const json& j) {
  if (!j.is_object()) throw ParseError("config: root must be a JSON object");
  if (!j.contains("defaults")) return j;
  json base = j["defaults"];
  if (!base.is_object()) throw ParseError("config: 'defaults' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "defaults") base[key] = value;
  }
  return base;
}

void apply_override(json& j, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ValidationError("override must look like key.path=value: " + assignment);
  }
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  json* node = &j;
  std::istringstream keys(path);
  std::string key;
  std::vector<std::string> parts;
  while (std::getline(keys, key, '.')) parts.push_back(key);
  if (parts.empty()) throw ValidationError("override has empty key: " + assignment);
  for (size_t i = 0; i + 1 < parts.size(); ++i) node = &((*node)[parts[i]]);
  json parsed = json::parse(value, nullptr, false);
  if (parsed.is_discarded()) parsed = value;  // plain string
  (*node)[parts.back()] = parsed;
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j[key].template get<T>();
}

PipelineConfig parse_config(json j, const std::vector<std::string>& overrides) {
  j = merge_defaults(j);
  for (const auto& ov : overrides) apply_override(j, ov);

  PipelineConfig cfg;
  get_if(j, "scene", cfg.scene_json);
  get_if(j, "correspondences", cfg.correspondences_csv);
  get_if(j, "gt_boxes", cfg.gt_boxes_json);
  get_if(j, "output_dir", cfg.output_dir);
  get_if(j, "seed", cfg.seed);
  get_if(j, "threads", cfg.threads);
  if (j.contains("fusion")) {
    const json& f = j["fusion"];
    get_if(f, "voxel_size", cfg.fusion.voxel_size);
    get_if(f, "percentile_low", cfg.fusion.percentile_low);
    get_if(f, "percentile_high", cfg.fusion.percentile_high);
  }
  if (j.contains("hough")) {
    const json& h = j["hough"];
    get_if(h, "theta_bins", cfg.hough.theta_bins);
    get_if(h, "phi_bins", cfg.hough.phi_bins);
    get_if(h, "rho_resolution", cfg.hough.rho_resolution);
    get_if(h, "inlier_threshold", cfg.hough.inlier_threshold);
    get_if(h, "min_inliers", cfg.hough.min_inliers);
    get_if(h, "max_planes", cfg.hough.max_planes);
    get_if(h, "vote_budget", cfg.hough.vote_budget);
    get_if(h, "subsample_seed", cfg.hough.subsample_seed);
  }
  if (j.contains("proposal")) {
    const json& p = j["proposal"];
    get_if(p, "radii", cfg.proposal.radii);
    get_if(p, "plane_fractions", cfg.proposal.plane_fractions);
    get_if(p, "coverage", cfg.proposal.coverage);
    get_if(p, "min_cluster_size", cfg.proposal.min_cluster_size);
    get_if(p, "merge_iou3d", cfg.proposal.merge_iou3d);
    get_if(p, "max_seeds", cfg.proposal.max_seeds);
  }
  if (j.contains("visibility")) {
    const json& v = j["visibility"];
    get_if(v, "depth_tolerance", cfg.visibility.depth_tolerance);
    get_if(v, "min_visible_points", cfg.visibility.min_visible_points);
    get_if(v, "min_box_side", cfg.visibility.min_box_side);
  }
  if (j.contains("eval")) {
    const json& e = j["eval"];
    get_if(e, "thresholds", cfg.eval.thresholds);
    get_if(e, "ap_iou_threshold", cfg.eval.ap_iou_threshold);
    if (e.contains("exclude_classes")) {
      cfg.eval.exclude_classes.clear();
      for (const auto& c : e["exclude_classes"]) {
        cfg.eval.exclude_classes.insert(c.get<std::string>());
      }
    }
  }
  return cfg;
}

std::vector<DepthCorrespondence> load_correspondences(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::vector<DepthCorrespondence> pairs;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string za, zb;
    if (!std::getline(ss, za, ',') || !std::getline(ss, zb, ',')) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected 'Z,z'");
    }
    DepthCorrespondence c;
    try {
      c.sfm_depth = std::stod(za);
      c.metric_depth = std::stod(zb);
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": bad number");
    }
    pairs.push_back(c);
  }
  return pairs;
}

json planes_to_json(const std::vector<PlaneModel>& planes) {
  json arr = json::array();
  for (const PlaneModel& pl : planes) {
    arr.push_back({{"normal", {pl.normal.x(), pl.normal.y(), pl.normal.z()}},
                   {"rho", pl.rho},
                   {"inlier_count", pl.inlier_count()},
                   {"inlier_indices", pl.inlier_indices}});
  }
  return json{{"planes", std::move(arr)}};
}

std::vector<PlaneModel> planes_from_json(const json& j, const std::string& ctx) {
  std::vector<PlaneModel> planes;
  for (const auto& jp : detail::require(j, "planes", ctx)) {
    PlaneModel pl;
    const auto& jn = detail::require(jp, "normal", ctx);
    for (int k = 0; k < 3; ++k) pl.normal[k] = jn[k].get<double>();
    pl.rho = detail::require(jp, "rho", ctx).get<double>();
    if (jp.contains("inlier_indices")) {
      pl.inlier_indices = jp["inlier_indices"].get<std::vector<int>>();
    }
    planes.push_back(std::move(pl));
  }
  return planes;
}

void write_recall_outputs(const RecallReport& report, const EvalParams& eval,
                          const std::string& prefix) {
  json j;
  j["classes"] = report.classes;
  j["thresholds"] = report.thresholds;
  j["recall"] = report.recall;
  j["proposals_per_image"] = report.proposals_per_image;
  if (!report.classes.empty()) {
    std::map<std::string, double> at_first;
    for (size_t c = 0; c < report.classes.size(); ++c) {
      at_first[report.classes[c]] = report.recall[c][0];
    }
    j["average_recall"] = class_average(at_first);
    try {
      j["average_recall_excluded"] = class_average(at_first, eval.exclude_classes);
    } catch (const ValidationError&) {
      // every class excluded; omit the field
    }
  }
  detail::save_json(j, prefix + ".json");

  std::ofstream csv(prefix + ".csv");
  csv << "class";
  for (double t : report.thresholds) csv << "," << t;
  csv << "\n";
  csv.precision(6);
  for (size_t c = 0; c < report.classes.size(); ++c) {
    csv << report.classes[c];
    for (size_t t = 0; t < report.thresholds.size(); ++t) csv << "," << report.recall[c][t];
    csv << "\n";
  }
}

std::vector<ScoredDetection> load_detections(const std::string& path) {
  const json j = detail::load_json(path);
  std::vector<ScoredDetection> dets;
  for (const auto& jd : detail::require(j, "detections", path)) {
    ScoredDetection d;
    d.frame_id = detail::require(jd, "frame_id", path).get<std::string>();
    d.box.xmin = detail::require(jd, "xmin", path).get<double>();
    d.box.ymin = detail::require(jd, "ymin", path).get<double>();
    d.box.xmax = detail::require(jd, "xmax", path).get<double>();
    d.box.ymax = detail::require(jd, "ymax", path).get<double>();
    d.box.label = detail::require(jd, "label", path).get<std::string>();
    d.score = detail::require(jd, "score", path).get<double>();
    dets.push_back(std::move(d));
  }
  return dets;
}

std::string hex64(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Shared scaffolding for both end-to-end flows: timed stages, .partial
// markers on failure, manifest with content hashes.
class PipelineRun {
 public:
  PipelineRun(const PipelineConfig& config, std::string flow)
      : config_(config), flow_(std::move(flow)) {
    config.validate();
    set_thread_count(config.threads);
    if (config.output_dir.empty()) throw ValidationError("config: output_dir is required");
    fs::create_directories(config.output_dir);
  }

  std::string path(const std::string& name) const {
    return (fs::path(config_.output_dir) / name).string();
  }

  template <typename Fn>
  void stage(const std::string& name, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (const std::exception& e) {
      std::ofstream marker(path(name + ".partial"));
      marker << e.what() << "\n";
      throw StageError(name, e.what());
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    stage_times_.push_back({name, dt.count()});
  }

  void artifact(const std::string& name) { artifacts_.push_back(name); }

  void write_manifest(const json& config_dump) {
    json j;
    j["flow"] = flow_;
    j["version"] = "0.1.0";
    j["config_hash"] = hex64(
        hash_bytes(config_dump.dump().data(), config_dump.dump().size()));
    json stages = json::array();
    for (const auto& [name, secs] : stage_times_) {
      stages.push_back({{"name", name}, {"seconds", secs}});
    }
    j["stages"] = std::move(stages);
    json arts = json::array();
    for (const auto& name : artifacts_) {
      arts.push_back({{"file", name}, {"hash", hex64(hash_file(path(name)))}});
    }
    j["artifacts"] = std::move(arts);
    detail::save_json(j, path("manifest.json"));
  }

 private:
  const PipelineConfig& config_;
  std::string flow_;
  std::vector<std::pair<std::string, double>> stage_times_;
  std::vector<std::string> artifacts_;
};

json config_dump(const PipelineConfig& c) {
  json j;
  j["scene"] = c.scene_json;
  j["correspondences"] = c.correspondences_csv;
  j["gt_boxes"] = c.gt_boxes_json;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  j["fusion"] = {{"voxel_size", c.fusion.voxel_size},
                 {"percentile_low", c.fusion.percentile_low},
                 {"percentile_high", c.fusion.percentile_high}};
  j["hough"] = {{"theta_bins", c.hough.theta_bins},     {"phi_bins", c.hough.phi_bins},
                {"rho_resolution", c.hough.rho_resolution},
                {"inlier_threshold", c.hough.inlier_threshold},
                {"min_inliers", c.hough.min_inliers},   {"max_planes", c.hough.max_planes},
                {"vote_budget", c.hough.vote_budget},   {"subsample_seed", c.hough.subsample_seed}};
  j["proposal"] = {{"radii", c.proposal.radii},
                   {"plane_fractions", c.proposal.plane_fractions},
                   {"coverage", c.proposal.coverage},
                   {"min_cluster_size", c.proposal.min_cluster_size},
                   {"merge_iou3d", c.proposal.merge_iou3d},
                   {"max_seeds", c.proposal.max_seeds}};
  j["visibility"] = {{"depth_tolerance", c.visibility.depth_tolerance},
                     {"min_visible_points", c.visibility.min_visible_points},
                     {"min_box_side", c.visibility.min_box_side}};
  j["eval"] = {{"thresholds", c.eval.thresholds},
               {"exclude_classes", std::vector<std::string>(c.eval.exclude_classes.begin(),
                                                            c.eval.exclude_classes.end())},
               {"ap_iou_threshold", c.eval.ap_iou_threshold}};
  // Thread count is excluded on purpose: it must not affect results.
  return j;
}

}  // namespace

PipelineConfig load_config(const std::string& json_path,
                           const std::vector<std::string>& overrides) {
  return parse_config(detail::load_json(json_path), overrides);
}

PipelineConfig config_from_json_text(const std::string& json_text,
                                     const std::vector<std::string>& overrides) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) throw ParseError("config: invalid JSON text");
  return parse_config(j, overrides);
}

uint64_t hash_bytes(const void* data, size_t n, uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) h = (h ^ p[i]) * 1099511628211ull;
  return h;
}

uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file for hashing");
  uint64_t h = 14695981039346656037ull;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    h = hash_bytes(buf, static_cast<size_t>(in.gcount()), h);
  }
  return h;
}

void save_proposals(const std::vector<Proposal3D>& proposals, const std::string& path) {
  json arr = json::array();
  for (const Proposal3D& p : proposals) {
    arr.push_back({{"min_corner", {p.cuboid.min_corner.x(), p.cuboid.min_corner.y(),
                                   p.cuboid.min_corner.z()}},
                   {"max_corner", {p.cuboid.max_corner.x(), p.cuboid.max_corner.y(),
                                   p.cuboid.max_corner.z()}},
                   {"provenance", {{"plane_fraction", p.plane_fraction}, {"radius", p.radius}}},
                   {"objective", p.objective},
                   {"point_count", p.point_indices.size()},
                   {"point_indices", p.point_indices}});
  }
  detail::save_json(json{{"proposals", std::move(arr)}}, path);
}

std::vector<Proposal3D> load_proposals(const std::string& path) {
  const json j = detail::load_json(path);
  std::vector<Proposal3D> out;
  for (const auto& jp : detail::require(j, "proposals", path)) {
    Proposal3D p;
    const auto& jmin = detail::require(jp, "min_corner", path);
    const auto& jmax = detail::require(jp, "max_corner", path);
    for (int k = 0; k < 3; ++k) {
      p.cuboid.min_corner[k] = jmin[k].get<double>();
      p.cuboid.max_corner[k] = jmax[k].get<double>();
    }
    const auto& jprov = detail::require(jp, "provenance", path);
    p.plane_fraction = detail::require(jprov, "plane_fraction", path).get<double>();
    p.radius = detail::require(jprov, "radius", path).get<double>();
    p.objective = jp.value("objective", 0.0);
    p.point_indices = detail::require(jp, "point_indices", path).get<std::vector<int>>();
    out.push_back(std::move(p));
  }
  return out;
}

void stage_fuse(const PipelineConfig& config, const std::string& out_ply,
                const std::string& out_report) {
  const Scene scene = load_scene(config.scene_json);
  const auto pairs = load_correspondences(config.correspondences_csv);
  const ScaleEstimate est = estimate_scale(pairs, config.fusion);
  const PointCloud world = fuse_frames(scene.frames, scene.intrinsics, est.alpha, config.fusion);
  save_cloud(world, out_ply);
  detail::save_json(json{{"alpha", est.alpha},
                         {"sample_count", est.sample_count},
                         {"fused_points", world.size()}},
                    out_report);
}

void stage_planes(const std::string& cloud_ply, const PipelineConfig& config,
                  const std::string& out_json, const std::string& filtered_dir) {
  const PointCloud cloud = load_cloud(cloud_ply);
  const auto planes = detect_planes(cloud, config.hough);
  detail::save_json(planes_to_json(planes), out_json);
  if (!filtered_dir.empty()) {
    fs::create_directories(filtered_dir);
    for (double f : config.proposal.plane_fractions) {
      char name[64];
      std::snprintf(name, sizeof(name), "filtered_%.2f.ply", f);
      save_cloud(remove_planes(cloud, planes, f), (fs::path(filtered_dir) / name).string());
    }
  }
}

void stage_propose(const std::string& cloud_ply, const std::string& planes_json,
                   const PipelineConfig& config, const std::string& out_json) {
  const PointCloud cloud = load_cloud(cloud_ply);
  std::vector<PlaneModel> planes;
  if (planes_json.empty()) {
    planes = detect_planes(cloud, config.hough);
  } else {
    planes = planes_from_json(detail::load_json(planes_json), planes_json);
  }
  const auto proposals = generate_proposals_multiview(cloud, planes, config.proposal);
  save_proposals(proposals, out_json);
}

void stage_project(const std::string& proposals_json, const std::string& cloud_ply, double alpha,
                   const PipelineConfig& config, const std::string& out_json) {
  if (!(alpha > 0)) throw ValidationError("project: alpha must be positive");
  const auto proposals = load_proposals(proposals_json);
  const PointCloud cloud = load_cloud(cloud_ply);
  Scene scene = load_scene(config.scene_json);
  for (CameraFrame& frame : scene.frames) frame.pose.translation *= alpha;
  save_boxes(project_proposals(proposals, cloud, scene, config.visibility), out_json);
}

void stage_eval(const std::string& proposal_boxes, const std::string& gt_boxes,
                const std::string& detections_json, const PipelineConfig& config,
                const std::string& out_prefix) {
  const auto props = load_boxes(proposal_boxes);
  const auto gt = load_boxes(gt_boxes);
  const RecallReport report = recall_report(props, gt, config.eval.thresholds);
  write_recall_outputs(report, config.eval, out_prefix);
  if (!detections_json.empty()) {
    const auto dets = load_detections(detections_json);
    const ApReport ap = average_precision(dets, gt, config.eval.ap_iou_threshold);
    json j;
    j["per_class"] = ap.per_class;
    j["mAP"] = ap.mean_ap;
    j["undefined_classes"] =
        std::vector<std::string>(ap.undefined_classes.begin(), ap.undefined_classes.end());
    detail::save_json(j, out_prefix + "_ap.json");
  }
}

void run_multiview(const PipelineConfig& config) {
  PipelineRun run(config, "multiview");
  if (config.scene_json.empty() || config.correspondences_csv.empty()) {
    throw ValidationError("config: multiview needs 'scene' and 'correspondences'");
  }

  run.stage("fuse", [&] { stage_fuse(config, run.path("world.ply"), run.path("fuse_report.json")); });
  run.artifact("world.ply");
  run.artifact("fuse_report.json");

  run.stage("planes", [&] { stage_planes(run.path("world.ply"), config, run.path("planes.json"), ""); });
  run.artifact("planes.json");

  run.stage("propose", [&] {
    stage_propose(run.path("world.ply"), run.path("planes.json"), config,
                  run.path("proposals.json"));
  });
  run.artifact("proposals.json");

  run.stage("project", [&] {
    const json rep = detail::load_json(run.path("fuse_report.json"));
    stage_project(run.path("proposals.json"), run.path("world.ply"),
                  detail::require(rep, "alpha", "fuse_report").get<double>(), config,
                  run.path("proposal_boxes.json"));
  });
  run.artifact("proposal_boxes.json");

  if (!config.gt_boxes_json.empty()) {
    run.stage("eval", [&] {
      stage_eval(run.path("proposal_boxes.json"), config.gt_boxes_json, "", config,
                 run.path("recall"));
    });
    run.artifact("recall.json");
    run.artifact("recall.csv");
  }
  run.write_manifest(config_dump(config));
}

void run_singleview(const PipelineConfig& config) {
  PipelineRun run(config, "singleview");
  if (config.scene_json.empty()) throw ValidationError("config: singleview needs 'scene'");

  std::vector<FrameBoxes> all_boxes;
  run.stage("propose", [&] {
    const Scene scene = load_scene(config.scene_json);
    json jframes = json::array();
    for (const CameraFrame& frame : scene.frames) {
      PointCloud cloud;
      const auto proposals = generate_proposals_singleview(frame, scene.intrinsics, config.hough,
                                                           config.proposal,
                                                           config.fusion.voxel_size, &cloud);
      // Project into the frame's own view: the cloud is already in this
      // camera's coordinates, so the pose is the identity.
      Scene own;
      own.intrinsics = scene.intrinsics;
      CameraFrame self;
      self.id = frame.id;
      self.depth = frame.depth;
      own.frames.push_back(std::move(self));
      auto boxes = project_proposals(proposals, cloud, own, config.visibility);
      all_boxes.push_back(std::move(boxes[0]));

      json jprops = json::array();
      for (const Proposal3D& p : proposals) {
        jprops.push_back({{"min_corner", {p.cuboid.min_corner.x(), p.cuboid.min_corner.y(),
                                          p.cuboid.min_corner.z()}},
                          {"max_corner", {p.cuboid.max_corner.x(), p.cuboid.max_corner.y(),
                                          p.cuboid.max_corner.z()}},
                          {"provenance",
                           {{"plane_fraction", p.plane_fraction}, {"radius", p.radius}}},
                          {"point_count", p.point_indices.size()}});
      }
      jframes.push_back(json{{"id", frame.id}, {"proposals", std::move(jprops)}});
    }
    detail::save_json(json{{"frames", std::move(jframes)}}, run.path("sv_proposals.json"));
    save_boxes(all_boxes, run.path("proposal_boxes.json"));
  });
  run.artifact("sv_proposals.json");
  run.artifact("proposal_boxes.json");

  if (!config.gt_boxes_json.empty()) {
    run.stage("eval", [&] {
      stage_eval(run.path("proposal_boxes.json"), config.gt_boxes_json, "", config,
                 run.path("recall"));
    });
    run.artifact("recall.json");
    run.artifact("recall.csv");
  } else {
    // No ground truth: still emit an empty report so the artifact set is
    // uniform.
    run.stage("eval", [&] {
      write_recall_outputs(RecallReport{{}, config.eval.thresholds, {}, 0}, config.eval,
                           run.path("recall"));
    });
    run.artifact("recall.json");
    run.artifact("recall.csv");
  }
  run.write_manifest(config_dump(config));
}

}  // namespace mvp
