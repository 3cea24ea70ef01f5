#include "mvprop/proposals.hpp"

#include "mvprop/camera.hpp"
#include "mvprop/mean_shift.hpp"
#include "mvprop/parallel.hpp"
#include "mvprop/scale.hpp"

#include <algorithm>
#include <cmath>

namespace mvp {

void ProposalParams::validate() const {
  if (radii.empty()) throw ValidationError("proposal: radii list must be nonempty");
  for (double r : radii) {
    if (!(r > 0)) throw ValidationError("proposal: radii must be positive");
  }
  if (plane_fractions.empty()) throw ValidationError("proposal: plane_fractions must be nonempty");
  for (double f : plane_fractions) {
    if (!(f > 0) || f > 1) throw ValidationError("proposal: plane fractions must be in (0, 1]");
  }
  if (!(coverage > 0) || coverage > 1) throw ValidationError("proposal: coverage not in (0, 1]");
  if (min_cluster_size < 1) throw ValidationError("proposal: min_cluster_size must be >= 1");
  if (merge_iou3d < 0 || merge_iou3d > 1) {
    throw ValidationError("proposal: merge_iou3d must be in [0, 1]");
  }
  if (max_seeds <= 0) throw ValidationError("proposal: max_seeds must be positive");
}

namespace {

// One clustering pass: mean shift the filtered cloud, fit a cuboid per
// surviving cluster, map member indices back to the source cloud.
std::vector<Proposal3D> sweep_pass(const PointCloud& filtered, const std::vector<int>& kept,
                                   double fraction, double radius,
                                   const ProposalParams& params) {
  std::vector<Proposal3D> out;
  if (filtered.empty()) return out;
  const auto clusters = mean_shift(filtered, radius, params.max_seeds);
  for (const Cluster& cluster : clusters) {
    if (cluster.size() < params.min_cluster_size) continue;
    const Cuboid3D box = fit_cuboid(filtered, cluster.point_indices, params.coverage);
    Proposal3D prop;
    prop.cuboid = box;
    prop.plane_fraction = fraction;
    prop.radius = radius;
    int included = 0;
    for (int i : cluster.point_indices) {
      if (box.contains(filtered.points[i])) {
        prop.point_indices.push_back(kept[i]);
        ++included;
      }
    }
    if (included < params.min_cluster_size) continue;
    prop.objective = box.volume() / included;
    out.push_back(std::move(prop));
  }
  return out;
}

std::vector<Proposal3D> run_sweep(const PointCloud& cloud, const std::vector<PlaneModel>& planes,
                                  const ProposalParams& params) {
  struct Pass {
    double fraction, radius;
    size_t fraction_idx;
  };
  std::vector<Pass> passes;
  for (size_t f = 0; f < params.plane_fractions.size(); ++f) {
    for (double r : params.radii) passes.push_back({params.plane_fractions[f], r, f});
  }

  // Filtered clouds are shared across the radius dimension of the grid.
  std::vector<PointCloud> filtered(params.plane_fractions.size());
  std::vector<std::vector<int>> kept(params.plane_fractions.size());
  for (size_t f = 0; f < params.plane_fractions.size(); ++f) {
    filtered[f] = remove_planes(cloud, planes, params.plane_fractions[f], &kept[f]);
  }

  std::vector<std::vector<Proposal3D>> per_pass(passes.size());
  parallel_for(passes.size(), [&](size_t i) {
    const Pass& pass = passes[i];
    per_pass[i] = sweep_pass(filtered[pass.fraction_idx], kept[pass.fraction_idx], pass.fraction,
                             pass.radius, params);
  });

  std::vector<Proposal3D> pooled;
  for (auto& batch : per_pass) {
    for (auto& p : batch) pooled.push_back(std::move(p));
  }

  // Greedy merge: best (lowest) objective first; later proposals overlapping
  // a kept one beyond merge_iou3d are dropped.
  std::stable_sort(pooled.begin(), pooled.end(), [](const Proposal3D& a, const Proposal3D& b) {
    if (a.objective != b.objective) return a.objective < b.objective;
    const double va = a.cuboid.volume(), vb = b.cuboid.volume();
    if (va != vb) return va < vb;
    return std::lexicographical_compare(
        a.cuboid.min_corner.data(), a.cuboid.min_corner.data() + 3, b.cuboid.min_corner.data(),
        b.cuboid.min_corner.data() + 3);
  });
  std::vector<Proposal3D> merged;
  for (auto& cand : pooled) {
    bool drop = false;
    for (const auto& keptp : merged) {
      if (iou_3d(cand.cuboid, keptp.cuboid) > params.merge_iou3d) {
        drop = true;
        break;
      }
    }
    if (!drop) merged.push_back(std::move(cand));
  }
  return merged;
}

}  // namespace

std::vector<Proposal3D> generate_proposals_multiview(const PointCloud& world_cloud,
                                                     const std::vector<PlaneModel>& planes,
                                                     const ProposalParams& params) {
  params.validate();
  return run_sweep(world_cloud, planes, params);
}

std::vector<Proposal3D> generate_proposals_singleview(const CameraFrame& frame,
                                                      const Intrinsics& intrinsics,
                                                      const HoughParams& hough,
                                                      const ProposalParams& params,
                                                      double voxel_size,
                                                      PointCloud* out_cloud) {
  params.validate();
  PointCloud cloud = backproject_depth(intrinsics, frame.depth);
  if (voxel_size > 0) cloud = voxel_downsample(cloud, voxel_size);
  cloud.source_frame = frame.id;
  std::vector<Proposal3D> out;
  if (!cloud.empty()) {
    const auto planes = detect_planes(cloud, hough);
    out = run_sweep(cloud, planes, params);
  }
  if (out_cloud) *out_cloud = std::move(cloud);
  return out;
}

}  // namespace mvp
