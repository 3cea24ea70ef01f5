// Command-line front end for the multi-view object proposal toolkit.
// Thin wrapper over the shared-library C API; exit codes mirror it:
// 0 success, 2 validation error, 1 stage failure.

#include <mvprop.h>

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

int report(int rc, const char* err) {
  if (rc != MVP_OK && err[0] != '\0') std::fprintf(stderr, "error: %s\n", err);
  return rc;
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view 3D object proposals from registered RGB-D frames"};
  app.require_subcommand(1);
  char err[1024] = {0};

  std::string config;
  app.add_option("--config", config, "Pipeline config JSON")->capture_default_str();

  // synth
  auto* synth = app.add_subcommand("synth", "Render a synthetic scene spec into a scene directory");
  std::string synth_spec, synth_out;
  uint64_t synth_seed = 1;
  synth->add_option("spec", synth_spec, "Scene spec JSON")->required();
  synth->add_option("out_dir", synth_out, "Output scene directory")->required();
  synth->add_option("--seed", synth_seed, "Noise seed");

  // fuse
  auto* fuse = app.add_subcommand("fuse", "Estimate metric scale and fuse depth frames");
  std::string fuse_scene, fuse_corr, fuse_ply, fuse_report;
  fuse->add_option("scene", fuse_scene, "Scene JSON")->required();
  fuse->add_option("correspondences", fuse_corr, "Depth correspondence CSV (Z,z per line)")
      ->required();
  fuse->add_option("out_ply", fuse_ply, "Fused world cloud (PLY)")->required();
  fuse->add_option("out_report", fuse_report, "Fusion report JSON")->required();

  // planes
  auto* planes = app.add_subcommand("planes", "Detect dominant planes in a point cloud");
  std::string planes_cloud, planes_out, planes_filtered;
  planes->add_option("cloud", planes_cloud, "Input cloud (PLY)")->required();
  planes->add_option("out_planes", planes_out, "Detected planes JSON")->required();
  planes->add_option("--filtered-dir", planes_filtered,
                     "Also write one plane-filtered PLY per configured fraction");

  // propose
  auto* propose = app.add_subcommand("propose", "Run the clustering + cuboid proposal sweep");
  std::string prop_cloud, prop_planes, prop_out;
  propose->add_option("cloud", prop_cloud, "Input cloud (PLY)")->required();
  propose->add_option("out_proposals", prop_out, "Proposals JSON")->required();
  propose->add_option("--planes", prop_planes, "Planes JSON (default: detect on the cloud)");

  // project
  auto* project = app.add_subcommand("project", "Project 3D proposals into every camera frame");
  std::string proj_props, proj_cloud, proj_scene, proj_out;
  double proj_alpha = 1.0;
  project->add_option("proposals", proj_props, "Proposals JSON")->required();
  project->add_option("cloud", proj_cloud, "World cloud (PLY)")->required();
  project->add_option("scene", proj_scene, "Scene JSON")->required();
  project->add_option("out_boxes", proj_out, "Per-frame box JSON")->required();
  project->add_option("--alpha", proj_alpha, "Metric scale for pose translations")
      ->capture_default_str();

  // eval
  auto* eval = app.add_subcommand("eval", "Recall report (and AP with --detections)");
  std::string eval_props, eval_gt, eval_dets, eval_prefix;
  eval->add_option("proposal_boxes", eval_props, "Proposal boxes JSON")->required();
  eval->add_option("gt_boxes", eval_gt, "Ground-truth boxes JSON")->required();
  eval->add_option("out_prefix", eval_prefix, "Report prefix (<prefix>.json/.csv)")->required();
  eval->add_option("--detections", eval_dets, "Scored detections JSON for AP");

  // end-to-end flows
  std::vector<std::string> overrides;
  auto* mv = app.add_subcommand("run-multiview", "fuse -> planes -> propose -> project -> eval");
  auto* sv = app.add_subcommand("run-singleview", "Per-frame proposals -> project -> eval");
  for (auto* sub : {mv, sv}) {
    sub->add_option("--set", overrides, "Config override, e.g. proposal.coverage=0.95");
  }

  CLI11_PARSE(app, argc, argv);

  if (*synth) {
    return report(mvp_synth(synth_spec.c_str(), synth_seed, synth_out.c_str(), err, sizeof(err)),
                  err);
  }
  if (*fuse) {
    return report(mvp_fuse(fuse_scene.c_str(), fuse_corr.c_str(), opt(config), fuse_ply.c_str(),
                           fuse_report.c_str(), err, sizeof(err)),
                  err);
  }
  if (*planes) {
    return report(mvp_planes(planes_cloud.c_str(), opt(config), planes_out.c_str(),
                             opt(planes_filtered), err, sizeof(err)),
                  err);
  }
  if (*propose) {
    return report(mvp_propose(prop_cloud.c_str(), opt(prop_planes), opt(config), prop_out.c_str(),
                              err, sizeof(err)),
                  err);
  }
  if (*project) {
    return report(mvp_project(proj_props.c_str(), proj_cloud.c_str(), proj_scene.c_str(),
                              proj_alpha, opt(config), proj_out.c_str(), err, sizeof(err)),
                  err);
  }
  if (*eval) {
    return report(mvp_eval(eval_props.c_str(), eval_gt.c_str(), opt(eval_dets), opt(config),
                           eval_prefix.c_str(), err, sizeof(err)),
                  err);
  }

  std::vector<const char*> ov_ptrs;
  for (const auto& s : overrides) ov_ptrs.push_back(s.c_str());
  if (*mv) {
    return report(mvp_run_multiview(opt(config), ov_ptrs.data(), ov_ptrs.size(), err, sizeof(err)),
                  err);
  }
  return report(mvp_run_singleview(opt(config), ov_ptrs.data(), ov_ptrs.size(), err, sizeof(err)),
                err);
}
