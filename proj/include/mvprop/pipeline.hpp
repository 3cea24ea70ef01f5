#pragma once

#include "mvprop/evaluation.hpp"
#include "mvprop/plane_detect.hpp"
#include "mvprop/projection.hpp"
#include "mvprop/proposals.hpp"
#include "mvprop/scale.hpp"

namespace mvp {

struct EvalParams {
  std::vector<double> thresholds = {0.50, 0.55, 0.60, 0.65, 0.70,
                                    0.75, 0.80, 0.85, 0.90, 0.95};
  std::set<std::string> exclude_classes;
  double ap_iou_threshold = 0.5;
};

struct PipelineConfig {
  std::string scene_json;
  std::string correspondences_csv;
  std::string gt_boxes_json;
  std::string output_dir;
  uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  FusionParams fusion;
  HoughParams hough;
  ProposalParams proposal;
  VisibilityParams visibility;
  EvalParams eval;

  void validate() const;
};

/// Loads a config file: a JSON object, optionally with a "defaults" layer
/// that top-level keys override, then dotted-path overrides like
/// "proposal.coverage=0.95".
PipelineConfig load_config(const std::string& json_path,
                           const std::vector<std::string>& overrides = {});
PipelineConfig config_from_json_text(const std::string& json_text,
                                     const std::vector<std::string>& overrides = {});

/// A stage failure; carries the stage name for diagnostics.
struct StageError : std::runtime_error {
  std::string stage;
  StageError(std::string stage_name, const std::string& what)
      : std::runtime_error(stage_name + ": " + what), stage(std::move(stage_name)) {}
};

/// fuse -> planes -> propose -> project -> eval, artifacts under output_dir,
/// plus manifest.json with config hash, per-stage wall time and a content
/// hash for every output file.
void run_multiview(const PipelineConfig& config);

/// The per-frame variant: no fusion, proposals from each frame's own cloud.
void run_singleview(const PipelineConfig& config);

// Stage entry points shared by the CLI.
void stage_fuse(const PipelineConfig& config, const std::string& out_ply,
                const std::string& out_report);
void stage_planes(const std::string& cloud_ply, const PipelineConfig& config,
                  const std::string& out_json, const std::string& filtered_dir);
void stage_propose(const std::string& cloud_ply, const std::string& planes_json,
                   const PipelineConfig& config, const std::string& out_json);
void stage_project(const std::string& proposals_json, const std::string& cloud_ply,
                   double alpha, const PipelineConfig& config, const std::string& out_json);
void stage_eval(const std::string& proposal_boxes, const std::string& gt_boxes,
                const std::string& detections_json, const PipelineConfig& config,
                const std::string& out_prefix);

// Proposal list (de)serialization: {"proposals":[{min_corner,max_corner,
// provenance:{plane_fraction,radius},point_count,point_indices}]}
void save_proposals(const std::vector<Proposal3D>& proposals, const std::string& path);
std::vector<Proposal3D> load_proposals(const std::string& path);

// Stable 64-bit FNV-1a content hash used in manifests.
uint64_t hash_file(const std::string& path);
uint64_t hash_bytes(const void* data, size_t n, uint64_t h = 14695981039346656037ull);

}  // namespace mvp
