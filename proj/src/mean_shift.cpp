#include "mvprop/mean_shift.hpp"

#include "mvprop/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace mvp {

namespace {

constexpr double kConvergenceTol = 1e-4;
constexpr int kMaxIterations = 100;

// Dense grid over the cloud's bounding box, cells laid out in CSR form.
// Cells fully inside the query ball contribute precomputed aggregates;
// only cells crossing the ball surface need per-point distance tests.
struct PointGrid {
  double cell = 1;
  Vec3 origin = Vec3::Zero();
  int nx = 0, ny = 0, nz = 0;
  const std::vector<Vec3>* points = nullptr;
  std::vector<int> offsets;   // nx*ny*nz + 1
  std::vector<int> ids;       // point indices grouped by cell, ascending
  std::vector<Vec3> cell_sum; // sum of points per cell

  size_t cell_index(int x, int y, int z) const {
    return (static_cast<size_t>(z) * ny + y) * nx + x;
  }

  void build(const std::vector<Vec3>& pts, double radius) {
    points = &pts;
    Vec3 lo = pts[0], hi = pts[0];
    for (const Vec3& p : pts) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    // Finer cells shrink the boundary shell that needs per-point tests;
    // the floor keeps the cell count bounded on large sparse clouds.
    cell = std::max(radius / 4.0, (hi - lo).maxCoeff() / 512.0);
    origin = lo;
    nx = static_cast<int>(std::floor((hi.x() - lo.x()) / cell)) + 1;
    ny = static_cast<int>(std::floor((hi.y() - lo.y()) / cell)) + 1;
    nz = static_cast<int>(std::floor((hi.z() - lo.z()) / cell)) + 1;
    const size_t n_cells = static_cast<size_t>(nx) * ny * nz;

    std::vector<int> of(pts.size());
    offsets.assign(n_cells + 1, 0);
    for (size_t i = 0; i < pts.size(); ++i) {
      const Vec3 r = pts[i] - origin;
      const int x = std::min(nx - 1, static_cast<int>(std::floor(r.x() / cell)));
      const int y = std::min(ny - 1, static_cast<int>(std::floor(r.y() / cell)));
      const int z = std::min(nz - 1, static_cast<int>(std::floor(r.z() / cell)));
      of[i] = static_cast<int>(cell_index(x, y, z));
      ++offsets[of[i] + 1];
    }
    for (size_t c = 0; c < n_cells; ++c) offsets[c + 1] += offsets[c];
    ids.resize(pts.size());
    std::vector<int> cursor(offsets.begin(), offsets.end() - 1);
    for (size_t i = 0; i < pts.size(); ++i) ids[cursor[of[i]]++] = static_cast<int>(i);
    cell_sum.assign(n_cells, Vec3::Zero());
    for (size_t c = 0; c < n_cells; ++c) {
      for (int k = offsets[c]; k < offsets[c + 1]; ++k) cell_sum[c] += pts[ids[k]];
    }
  }

  // Sum and count of points within `radius` of m (closed ball).
  void query(const Vec3& m, double radius, Vec3& sum, size_t& count) const {
    sum.setZero();
    count = 0;
    const double r2 = radius * radius;
    const Vec3 rel = m - origin;
    const auto lo_idx = [&](double v, int n) {
      return std::clamp(static_cast<int>(std::floor((v - radius) / cell)), 0, n - 1);
    };
    const auto hi_idx = [&](double v, int n) {
      return std::clamp(static_cast<int>(std::floor((v + radius) / cell)), 0, n - 1);
    };
    const int x0 = lo_idx(rel.x(), nx), x1 = hi_idx(rel.x(), nx);
    const int y0 = lo_idx(rel.y(), ny), y1 = hi_idx(rel.y(), ny);
    const int z0 = lo_idx(rel.z(), nz), z1 = hi_idx(rel.z(), nz);
    const std::vector<Vec3>& pts = *points;
    for (int z = z0; z <= z1; ++z) {
      const double zl = z * cell - rel.z(), zh = zl + cell;
      const double dz_near = std::max({zl, -zh, 0.0});
      const double dz_far = std::max(std::abs(zl), std::abs(zh));
      for (int y = y0; y <= y1; ++y) {
        const double yl = y * cell - rel.y(), yh = yl + cell;
        const double dy_near = std::max({yl, -yh, 0.0});
        const double dy_far = std::max(std::abs(yl), std::abs(yh));
        const double near_yz = dy_near * dy_near + dz_near * dz_near;
        if (near_yz > r2) continue;
        const double far_yz = dy_far * dy_far + dz_far * dz_far;
        for (int x = x0; x <= x1; ++x) {
          const size_t c = cell_index(x, y, z);
          const int begin = offsets[c], end = offsets[c + 1];
          if (begin == end) continue;
          const double xl = x * cell - rel.x(), xh = xl + cell;
          const double dx_near = std::max({xl, -xh, 0.0});
          if (near_yz + dx_near * dx_near > r2) continue;
          const double dx_far = std::max(std::abs(xl), std::abs(xh));
          if (far_yz + dx_far * dx_far <= r2) {  // cell fully inside the ball
            sum += cell_sum[c];
            count += static_cast<size_t>(end - begin);
            continue;
          }
          for (int k = begin; k < end; ++k) {
            const Vec3& p = pts[ids[k]];
            if ((p - m).squaredNorm() <= r2) {
              sum += p;
              ++count;
            }
          }
        }
      }
    }
  }
};

uint64_t quantize_key(const Vec3& p) {
  // 1e-7 m grid; identical trajectories collapse to one representative.
  const auto q = [](double v) {
    return static_cast<uint64_t>(static_cast<int64_t>(std::llround(v * 1e7)));
  };
  uint64_t h = 14695981039346656037ull;
  for (const uint64_t v : {q(p.x()), q(p.y()), q(p.z())}) {
    h = (h ^ v) * 1099511628211ull;
  }
  return h;
}

}  // namespace

std::vector<Cluster> mean_shift(const PointCloud& cloud, double radius, int max_seeds) {
  if (!(radius > 0)) throw ValidationError("mean_shift: radius must be positive");
  if (max_seeds <= 0) throw ValidationError("mean_shift: max_seeds must be positive");
  if (cloud.empty()) return {};
  const std::vector<Vec3>& pts = cloud.points;
  const size_t n = pts.size();

  PointGrid grid;
  grid.build(pts, radius);

  const size_t stride =
      n <= static_cast<size_t>(max_seeds) ? 1 : (n + max_seeds - 1) / max_seeds;
  std::vector<int> seed_point;  // seed -> point index
  for (size_t i = 0; i < n; i += stride) seed_point.push_back(static_cast<int>(i));
  const size_t n_seeds = seed_point.size();

  std::vector<Vec3> pos(n_seeds);
  for (size_t s = 0; s < n_seeds; ++s) pos[s] = pts[seed_point[s]];
  std::vector<char> converged(n_seeds, 0);

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    // Seeds sharing a (quantized) position iterate once via a representative.
    std::unordered_map<uint64_t, size_t> rep_of;
    std::vector<size_t> reps;
    std::vector<std::vector<size_t>> followers;
    for (size_t s = 0; s < n_seeds; ++s) {
      if (converged[s]) continue;
      const uint64_t key = quantize_key(pos[s]);
      auto [it, inserted] = rep_of.try_emplace(key, reps.size());
      if (inserted) {
        reps.push_back(s);
        followers.emplace_back();
      }
      followers[it->second].push_back(s);
    }
    if (reps.empty()) break;

    std::vector<Vec3> next(reps.size());
    std::vector<char> done(reps.size(), 0);
    parallel_for(reps.size(), [&](size_t r) {
      Vec3 sum;
      size_t count = 0;
      grid.query(pos[reps[r]], radius, sum, count);
      if (count == 0) {  // stranded between samples; stop here
        next[r] = pos[reps[r]];
        done[r] = 1;
        return;
      }
      next[r] = sum / static_cast<double>(count);
      if ((next[r] - pos[reps[r]]).norm() < kConvergenceTol) done[r] = 1;
    });
    for (size_t r = 0; r < reps.size(); ++r) {
      for (size_t s : followers[r]) {
        pos[s] = next[r];
        converged[s] = done[r];
      }
    }
  }

  // Greedy merge of converged modes in seed order.
  struct Merged {
    Vec3 sum = Vec3::Zero();
    size_t weight = 0;
    Vec3 mean() const { return sum / static_cast<double>(weight); }
  };
  std::vector<Merged> merged;
  std::vector<int> seed_cluster(n_seeds, -1);
  const double merge_r = radius / 2.0;
  for (size_t s = 0; s < n_seeds; ++s) {
    int target = -1;
    for (size_t c = 0; c < merged.size(); ++c) {
      if ((merged[c].mean() - pos[s]).norm() < merge_r) {
        target = static_cast<int>(c);
        break;
      }
    }
    if (target < 0) {
      merged.push_back({});
      target = static_cast<int>(merged.size() - 1);
    }
    merged[target].sum += pos[s];
    merged[target].weight += 1;
    seed_cluster[s] = target;
  }

  std::vector<Cluster> clusters(merged.size());
  for (size_t c = 0; c < merged.size(); ++c) clusters[c].mode = merged[c].mean();

  // Assignment: a seed's own point follows its seed; other points join the
  // nearest mode (ties to the lower cluster index).
  std::vector<int> point_cluster(n, -1);
  for (size_t s = 0; s < n_seeds; ++s) point_cluster[seed_point[s]] = seed_cluster[s];
  if (stride > 1) {
    parallel_for(n, [&](size_t i) {
      if (point_cluster[i] >= 0) return;
      int best = 0;
      double best_d = (pts[i] - clusters[0].mode).squaredNorm();
      for (size_t c = 1; c < clusters.size(); ++c) {
        const double d = (pts[i] - clusters[c].mode).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      point_cluster[i] = best;
    });
  }
  for (size_t i = 0; i < n; ++i) {
    clusters[point_cluster[i]].point_indices.push_back(static_cast<int>(i));
  }

  std::erase_if(clusters, [](const Cluster& c) { return c.point_indices.empty(); });
  std::stable_sort(clusters.begin(), clusters.end(),
                   [](const Cluster& a, const Cluster& b) { return a.size() > b.size(); });
  return clusters;
}

}  // namespace mvp
