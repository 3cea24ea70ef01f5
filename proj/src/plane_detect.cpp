#include "mvprop/plane_detect.hpp"

#include "mvprop/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace mvp {

void HoughParams::validate() const {
  if (theta_bins <= 0 || phi_bins <= 0) throw ValidationError("hough: bins must be positive");
  if (!(rho_resolution > 0)) throw ValidationError("hough: rho_resolution must be positive");
  if (!(inlier_threshold > 0)) throw ValidationError("hough: inlier_threshold must be positive");
  if (min_inliers < 0) throw ValidationError("hough: min_inliers must be non-negative");
  if (max_planes <= 0) throw ValidationError("hough: max_planes must be positive");
  if (vote_budget == 0) throw ValidationError("hough: vote_budget must be positive");
}

namespace {

struct Accumulator {
  std::vector<Vec3> directions;  // upper hemisphere
  double rho_min = 0;
  int n_rho = 0;
  double inv_res = 0;
  std::vector<uint32_t> votes;  // [direction][rho bin]
};

// Plane normals are unique up to sign, so directions cover the upper
// hemisphere only and rho stays signed.
std::vector<Vec3> make_directions(int theta_bins, int phi_bins) {
  std::vector<Vec3> dirs;
  dirs.reserve(static_cast<size_t>(theta_bins) * phi_bins);
  for (int i = 0; i < theta_bins; ++i) {
    const double theta = (i + 0.5) / theta_bins * (std::numbers::pi / 2.0);
    const double st = std::sin(theta), ct = std::cos(theta);
    for (int j = 0; j < phi_bins; ++j) {
      const double phi = (j + 0.5) / phi_bins * (2.0 * std::numbers::pi);
      dirs.emplace_back(st * std::cos(phi), st * std::sin(phi), ct);
    }
  }
  return dirs;
}

void canonicalize(Vec3& normal, double& rho) {
  bool flip = rho < 0;
  if (rho == 0) {
    // Deterministic sign: first nonzero component positive.
    for (int k = 0; k < 3; ++k) {
      if (normal[k] != 0) {
        flip = normal[k] < 0;
        break;
      }
    }
  }
  if (flip) {
    normal = -normal;
    rho = -rho;
  }
}

// Least-squares plane through the given points (centroid + smallest
// covariance eigenvector).
bool fit_plane_ls(const std::vector<Vec3>& points, const std::vector<int>& idx, Vec3& normal,
                  double& rho) {
  if (idx.size() < 3) return false;
  Vec3 centroid = Vec3::Zero();
  for (int i : idx) centroid += points[i];
  centroid /= static_cast<double>(idx.size());
  Mat3 cov = Mat3::Zero();
  for (int i : idx) {
    const Vec3 d = points[i] - centroid;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  if (eig.info() != Eigen::Success) return false;
  normal = eig.eigenvectors().col(0).normalized();
  rho = normal.dot(centroid);
  canonicalize(normal, rho);
  return true;
}

}  // namespace

std::vector<PlaneModel> detect_planes(const PointCloud& cloud, const HoughParams& params) {
  params.validate();
  if (cloud.empty()) throw ValidationError("detect_planes: empty cloud");
  const std::vector<Vec3>& pts = cloud.points;
  const size_t n = pts.size();

  const int min_inliers =
      params.min_inliers > 0
          ? params.min_inliers
          : std::max<int>(3, static_cast<int>(std::llround(0.005 * static_cast<double>(n))));

  Accumulator acc;
  acc.directions = make_directions(params.theta_bins, params.phi_bins);
  double max_norm = 0;
  for (const Vec3& p : pts) max_norm = std::max(max_norm, p.lpNorm<Eigen::Infinity>());
  const double radius = max_norm * std::sqrt(3.0) + params.rho_resolution;
  acc.rho_min = -radius;
  acc.inv_res = 1.0 / params.rho_resolution;
  acc.n_rho = static_cast<int>(std::floor(2.0 * radius * acc.inv_res)) + 1;
  const size_t n_dirs = acc.directions.size();
  acc.votes.assign(n_dirs * acc.n_rho, 0);

  std::vector<char> removed(n, 0);
  std::vector<int> active;
  active.reserve(n);
  for (size_t i = 0; i < n; ++i) active.push_back(static_cast<int>(i));

  std::vector<PlaneModel> planes;
  std::mt19937_64 rng(params.subsample_seed);

  while (static_cast<int>(planes.size()) < params.max_planes &&
         active.size() >= static_cast<size_t>(std::max(min_inliers, 3))) {
    // Vote with at most vote_budget points.
    std::vector<int> voters;
    if (active.size() > params.vote_budget) {
      voters.reserve(params.vote_budget);
      std::sample(active.begin(), active.end(), std::back_inserter(voters), params.vote_budget,
                  rng);
    } else {
      voters = active;
    }
    std::vector<Vec3> vp;
    vp.reserve(voters.size());
    for (int i : voters) vp.push_back(pts[i]);

    std::fill(acc.votes.begin(), acc.votes.end(), 0);
    // Each chunk owns a disjoint band of direction rows, so the shared
    // accumulator needs no merge and the result is chunking-independent.
    parallel_chunks(n_dirs, [&](size_t d_begin, size_t d_end) {
      for (size_t d = d_begin; d < d_end; ++d) {
        const Vec3 dir = acc.directions[d];
        uint32_t* row = acc.votes.data() + d * acc.n_rho;
        for (const Vec3& p : vp) {
          const double rho = dir.dot(p);
          const int bin = static_cast<int>((rho - acc.rho_min) * acc.inv_res);
          ++row[bin];
        }
      }
    });

    const auto peak_it = std::max_element(acc.votes.begin(), acc.votes.end());
    if (*peak_it < 3) break;
    const size_t peak = static_cast<size_t>(peak_it - acc.votes.begin());
    Vec3 normal = acc.directions[peak / acc.n_rho];
    double rho = acc.rho_min + (static_cast<double>(peak % acc.n_rho) + 0.5) / acc.inv_res;
    canonicalize(normal, rho);

    // Refine against the full active set.
    std::vector<int> inliers;
    bool ok = true;
    for (int round = 0; round < 3 && ok; ++round) {
      inliers.clear();
      for (int i : active) {
        if (std::abs(normal.dot(pts[i]) - rho) <= params.inlier_threshold) inliers.push_back(i);
      }
      if (inliers.size() < 3) {
        ok = false;
        break;
      }
      ok = fit_plane_ls(pts, inliers, normal, rho);
    }
    if (ok) {
      inliers.clear();
      for (int i : active) {
        if (std::abs(normal.dot(pts[i]) - rho) <= params.inlier_threshold) inliers.push_back(i);
      }
    }
    if (!ok || static_cast<int>(inliers.size()) < min_inliers) break;

    PlaneModel plane;
    plane.normal = normal;
    plane.rho = rho;
    plane.inlier_indices = inliers;
    planes.push_back(std::move(plane));

    for (int i : inliers) removed[i] = 1;
    std::erase_if(active, [&](int i) { return removed[i]; });
  }

  std::stable_sort(planes.begin(), planes.end(), [](const PlaneModel& a, const PlaneModel& b) {
    if (a.inlier_count() != b.inlier_count()) return a.inlier_count() > b.inlier_count();
    if (a.rho != b.rho) return a.rho < b.rho;
    return std::lexicographical_compare(a.normal.data(), a.normal.data() + 3, b.normal.data(),
                                        b.normal.data() + 3);
  });
  return planes;
}

PointCloud remove_planes(const PointCloud& cloud, const std::vector<PlaneModel>& planes,
                         double fraction, std::vector<int>* kept_indices) {
  if (!(fraction > 0) || fraction > 1) {
    throw ValidationError("remove_planes: fraction must be in (0, 1]");
  }
  if (kept_indices) kept_indices->clear();
  if (planes.empty()) {
    if (kept_indices) {
      kept_indices->reserve(cloud.size());
      for (size_t i = 0; i < cloud.size(); ++i) kept_indices->push_back(static_cast<int>(i));
    }
    return cloud;
  }
  const size_t k = std::max<size_t>(
      1, static_cast<size_t>(std::llround(fraction * static_cast<double>(planes.size()))));
  std::vector<char> drop(cloud.size(), 0);
  for (size_t p = 0; p < std::min(k, planes.size()); ++p) {
    for (int i : planes[p].inlier_indices) {
      if (i < 0 || static_cast<size_t>(i) >= cloud.size()) {
        throw ValidationError("remove_planes: inlier index out of range");
      }
      drop[i] = 1;
    }
  }
  PointCloud out;
  for (size_t i = 0; i < cloud.size(); ++i) {
    if (drop[i]) continue;
    out.points.push_back(cloud.points[i]);
    if (cloud.has_colors()) out.colors.push_back(cloud.colors[i]);
    if (kept_indices) kept_indices->push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace mvp
