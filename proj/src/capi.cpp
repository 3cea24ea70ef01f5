#include "mvprop.h"

#include "mvprop/pipeline.hpp"
#include "mvprop/ply_io.hpp"
#include "mvprop/synth.hpp"

#include <cstring>
#include <string>

struct mvp_cloud {
  mvp::PointCloud cloud;
};

namespace {

void copy_err(char* err, size_t err_len, const char* msg) {
  if (!err || err_len == 0) return;
  std::strncpy(err, msg, err_len - 1);
  err[err_len - 1] = '\0';
}

// Maps C++ exceptions onto the C error codes: validation and parse problems
// are the caller's fault (2), everything else is a stage failure (1).
template <typename Fn>
int guarded(char* err, size_t err_len, Fn&& fn) {
  try {
    fn();
    copy_err(err, err_len, "");
    return MVP_OK;
  } catch (const mvp::ValidationError& e) {
    copy_err(err, err_len, e.what());
    return MVP_ERR_VALIDATION;
  } catch (const mvp::ParseError& e) {
    copy_err(err, err_len, e.what());
    return MVP_ERR_VALIDATION;
  } catch (const std::exception& e) {
    copy_err(err, err_len, e.what());
    return MVP_ERR_FAILURE;
  } catch (...) {
    copy_err(err, err_len, "unknown error");
    return MVP_ERR_FAILURE;
  }
}

mvp::PipelineConfig load_or_default(const char* config_path) {
  if (!config_path || !*config_path) return mvp::PipelineConfig{};
  return mvp::load_config(config_path);
}

std::string str(const char* s) { return s ? std::string(s) : std::string(); }

}  // namespace

extern "C" {

mvp_cloud* mvp_cloud_load(const char* ply_path, char* err, size_t err_len) {
  mvp_cloud* handle = nullptr;
  const int rc = guarded(err, err_len, [&] {
    handle = new mvp_cloud{mvp::load_cloud(str(ply_path))};
  });
  return rc == MVP_OK ? handle : nullptr;
}

void mvp_cloud_free(mvp_cloud* cloud) { delete cloud; }

size_t mvp_cloud_size(const mvp_cloud* cloud) { return cloud ? cloud->cloud.size() : 0; }

int mvp_cloud_point(const mvp_cloud* cloud, size_t i, double xyz[3]) {
  if (!cloud || !xyz || i >= cloud->cloud.size()) return MVP_ERR_VALIDATION;
  const mvp::Vec3& p = cloud->cloud.points[i];
  xyz[0] = p.x();
  xyz[1] = p.y();
  xyz[2] = p.z();
  return MVP_OK;
}

int mvp_cloud_save(const mvp_cloud* cloud, const char* ply_path, char* err, size_t err_len) {
  if (!cloud) {
    copy_err(err, err_len, "null cloud handle");
    return MVP_ERR_VALIDATION;
  }
  return guarded(err, err_len, [&] { mvp::save_cloud(cloud->cloud, str(ply_path)); });
}

int mvp_synth(const char* spec_json, uint64_t seed, const char* out_dir, char* err,
              size_t err_len) {
  return guarded(err, err_len, [&] {
    mvp::SceneSpec spec = mvp::load_scene_spec(str(spec_json));
    const mvp::SceneTruth truth = mvp::generate_scene(spec, seed);
    mvp::write_scene_dir(spec, truth, str(out_dir));
  });
}

int mvp_fuse(const char* scene_json, const char* corr_csv, const char* config_path,
             const char* out_ply, const char* out_report_json, char* err, size_t err_len) {
  return guarded(err, err_len, [&] {
    mvp::PipelineConfig config = load_or_default(config_path);
    config.scene_json = str(scene_json);
    config.correspondences_csv = str(corr_csv);
    mvp::stage_fuse(config, str(out_ply), str(out_report_json));
  });
}

int mvp_planes(const char* cloud_ply, const char* config_path, const char* out_planes_json,
               const char* filtered_dir, char* err, size_t err_len) {
  return guarded(err, err_len, [&] {
    mvp::stage_planes(str(cloud_ply), load_or_default(config_path), str(out_planes_json),
                      str(filtered_dir));
  });
}

int mvp_propose(const char* cloud_ply, const char* planes_json, const char* config_path,
                const char* out_proposals_json, char* err, size_t err_len) {
  return guarded(err, err_len, [&] {
    mvp::stage_propose(str(cloud_ply), str(planes_json), load_or_default(config_path),
                       str(out_proposals_json));
  });
}

int mvp_project(const char* proposals_json, const char* cloud_ply, const char* scene_json,
                double alpha, const char* config_path, const char* out_boxes_json, char* err,
                size_t err_len) {
  return guarded(err, err_len, [&] {
    mvp::PipelineConfig config = load_or_default(config_path);
    config.scene_json = str(scene_json);
    mvp::stage_project(str(proposals_json), str(cloud_ply), alpha, config, str(out_boxes_json));
  });
}

int mvp_eval(const char* proposal_boxes_json, const char* gt_boxes_json,
             const char* detections_json, const char* config_path, const char* out_prefix,
             char* err, size_t err_len) {
  return guarded(err, err_len, [&] {
    mvp::stage_eval(str(proposal_boxes_json), str(gt_boxes_json), str(detections_json),
                    load_or_default(config_path), str(out_prefix));
  });
}

namespace {

int run_flow(const char* config_path, const char* const* overrides, size_t n_overrides, char* err,
             size_t err_len, void (*flow)(const mvp::PipelineConfig&)) {
  return guarded(err, err_len, [&] {
    std::vector<std::string> ovs;
    for (size_t i = 0; i < n_overrides; ++i) ovs.push_back(str(overrides[i]));
    mvp::PipelineConfig config = config_path && *config_path
                                     ? mvp::load_config(config_path, ovs)
                                     : mvp::config_from_json_text("{}", ovs);
    flow(config);
  });
}

}  // namespace

int mvp_run_multiview(const char* config_path, const char* const* overrides, size_t n_overrides,
                      char* err, size_t err_len) {
  return run_flow(config_path, overrides, n_overrides, err, err_len, &mvp::run_multiview);
}

int mvp_run_singleview(const char* config_path, const char* const* overrides, size_t n_overrides,
                       char* err, size_t err_len) {
  return run_flow(config_path, overrides, n_overrides, err, err_len, &mvp::run_singleview);
}

}  // extern "C"
