#include "mvprop/scale.hpp"

#include "mvprop/camera.hpp"
#include "mvprop/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace mvp {

namespace {

// Nearest-rank percentile on a sorted vector.
double percentile_nearest_rank(const std::vector<double>& sorted, double p) {
  const size_t n = sorted.size();
  size_t rank = static_cast<size_t>(std::ceil(p / 100.0 * n));
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  return sorted[rank - 1];
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ScaleEstimate estimate_scale(const std::vector<DepthCorrespondence>& pairs,
                             const FusionParams& params) {
  if (pairs.empty()) throw ValidationError("estimate_scale: no correspondences");
  if (!(params.percentile_low < params.percentile_high)) {
    throw ValidationError("estimate_scale: percentile_low must be below percentile_high");
  }
  std::vector<double> zs;
  zs.reserve(pairs.size());
  for (const auto& pr : pairs) {
    if (!(pr.sfm_depth > 0) || !(pr.metric_depth > 0) || !std::isfinite(pr.sfm_depth) ||
        !std::isfinite(pr.metric_depth)) {
      throw ValidationError("estimate_scale: correspondences must be positive and finite");
    }
    zs.push_back(pr.sfm_depth);
  }
  std::sort(zs.begin(), zs.end());
  const double lo = percentile_nearest_rank(zs, params.percentile_low);
  const double hi = percentile_nearest_rank(zs, params.percentile_high);

  std::vector<double> ratios;
  for (const auto& pr : pairs) {
    if (pr.sfm_depth < lo || pr.sfm_depth > hi) continue;
    ratios.push_back(pr.metric_depth / pr.sfm_depth);
  }
  if (ratios.empty()) throw ValidationError("estimate_scale: all correspondences filtered out");
  ScaleEstimate est;
  est.sample_count = ratios.size();
  est.alpha = median(std::move(ratios));
  return est;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size) {
  if (!(voxel_size > 0)) return cloud;
  struct Cell {
    Vec3 sum = Vec3::Zero();
    size_t count = 0;
  };
  std::unordered_map<uint64_t, size_t> index;
  std::vector<Cell> cells;  // first-occupied order
  const double inv = 1.0 / voxel_size;
  for (const Vec3& p : cloud.points) {
    const int64_t ix = static_cast<int64_t>(std::floor(p.x() * inv));
    const int64_t iy = static_cast<int64_t>(std::floor(p.y() * inv));
    const int64_t iz = static_cast<int64_t>(std::floor(p.z() * inv));
    // 21 bits per axis; scenes here span well under +-1e6 cells.
    const uint64_t key = ((static_cast<uint64_t>(ix) & 0x1fffff) << 42) |
                         ((static_cast<uint64_t>(iy) & 0x1fffff) << 21) |
                         (static_cast<uint64_t>(iz) & 0x1fffff);
    auto [it, inserted] = index.try_emplace(key, cells.size());
    if (inserted) cells.emplace_back();
    Cell& cell = cells[it->second];
    cell.sum += p;
    cell.count += 1;
  }
  PointCloud out;
  out.points.reserve(cells.size());
  for (const Cell& cell : cells) out.points.push_back(cell.sum / static_cast<double>(cell.count));
  return out;
}

PointCloud fuse_frames(const std::vector<CameraFrame>& frames, const Intrinsics& intrinsics,
                       double alpha, const FusionParams& params) {
  if (!(alpha > 0)) throw ValidationError("fuse_frames: alpha must be positive");
  intrinsics.validate();
  std::vector<PointCloud> per_frame(frames.size());
  parallel_for(frames.size(), [&](size_t i) {
    const CameraFrame& frame = frames[i];
    frame.pose.validate();
    Pose scaled = frame.pose;
    scaled.translation *= alpha;  // SfM translations -> metric
    per_frame[i] = transform_cloud(backproject_depth(intrinsics, frame.depth), scaled);
  });
  PointCloud fused;
  size_t total = 0;
  for (const auto& c : per_frame) total += c.size();
  fused.points.reserve(total);
  for (const auto& c : per_frame) {
    fused.points.insert(fused.points.end(), c.points.begin(), c.points.end());
  }
  return voxel_downsample(fused, params.voxel_size);
}

}  // namespace mvp
