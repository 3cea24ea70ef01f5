/* C API for the multi-view 3D object proposal toolkit.
 *
 * Every entry point returns MVP_OK (0) on success, MVP_ERR_VALIDATION (2)
 * when an input or config fails validation, and MVP_ERR_FAILURE (1) on any
 * other failure. A human-readable message is copied into (err, err_len)
 * when provided. Path arguments are UTF-8 filesystem paths; `config_path`
 * may be NULL to run with defaults.
 */
#ifndef MVPROP_H
#define MVPROP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define MVP_OK 0
#define MVP_ERR_FAILURE 1
#define MVP_ERR_VALIDATION 2

/* ---- opaque point-cloud handle ---- */

typedef struct mvp_cloud mvp_cloud;

mvp_cloud* mvp_cloud_load(const char* ply_path, char* err, size_t err_len);
void mvp_cloud_free(mvp_cloud* cloud);
size_t mvp_cloud_size(const mvp_cloud* cloud);
/* Copies point i into xyz[3]; returns MVP_OK or MVP_ERR_VALIDATION. */
int mvp_cloud_point(const mvp_cloud* cloud, size_t i, double xyz[3]);
int mvp_cloud_save(const mvp_cloud* cloud, const char* ply_path, char* err, size_t err_len);

/* ---- pipeline stages (file in, file out) ---- */

/* Renders a synthetic scene spec into a full scene directory. */
int mvp_synth(const char* spec_json, uint64_t seed, const char* out_dir,
              char* err, size_t err_len);

/* Scale estimation + depth fusion: scene JSON + correspondence CSV ("Z,z"
 * per line) -> world PLY and a JSON report {alpha, sample_count,
 * fused_points}. */
int mvp_fuse(const char* scene_json, const char* corr_csv, const char* config_path,
             const char* out_ply, const char* out_report_json, char* err, size_t err_len);

/* Hough plane detection. filtered_dir may be NULL; when set, one filtered
 * PLY per configured plane fraction is written there. */
int mvp_planes(const char* cloud_ply, const char* config_path, const char* out_planes_json,
               const char* filtered_dir, char* err, size_t err_len);

/* Proposal sweep. planes_json may be NULL to auto-detect on the cloud. */
int mvp_propose(const char* cloud_ply, const char* planes_json, const char* config_path,
                const char* out_proposals_json, char* err, size_t err_len);

/* Projects proposals into every frame of the scene. alpha rescales the
 * scene's pose translations to metric (use the fuse report's alpha; 1.0 for
 * already-metric scenes). */
int mvp_project(const char* proposals_json, const char* cloud_ply, const char* scene_json,
                double alpha, const char* config_path, const char* out_boxes_json,
                char* err, size_t err_len);

/* Recall report (+AP when detections_json is non-NULL) written as
 * <out_prefix>.json and <out_prefix>.csv. */
int mvp_eval(const char* proposal_boxes_json, const char* gt_boxes_json,
             const char* detections_json, const char* config_path,
             const char* out_prefix, char* err, size_t err_len);

/* ---- end-to-end flows ---- */

/* overrides: n dotted-path assignments like "proposal.coverage=0.95". */
int mvp_run_multiview(const char* config_path, const char* const* overrides, size_t n_overrides,
                      char* err, size_t err_len);
int mvp_run_singleview(const char* config_path, const char* const* overrides, size_t n_overrides,
                       char* err, size_t err_len);

#ifdef __cplusplus
}
#endif

#endif /* MVPROP_H */
