#include "mvprop/synth.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>

namespace mvp {

namespace {

// 512-bit point set for the exhaustive cuboid search (n <= 500).
struct Mask {
  std::array<uint64_t, 8> w{};

  void set(int i) { w[i >> 6] |= uint64_t{1} << (i & 63); }
  int count() const {
    int c = 0;
    for (uint64_t x : w) c += std::popcount(x);
    return c;
  }
  static Mask unite(const Mask& a, const Mask& b) {
    Mask m;
    for (int i = 0; i < 8; ++i) m.w[i] = a.w[i] | b.w[i];
    return m;
  }
};

struct Face {
  double value = 0;  // face coordinate
  Mask excluded;     // points strictly outside this face
  int excl_count = 0;
};

// Candidate faces on one side of one axis, cheapest exclusion first.
std::vector<Face> face_candidates(const std::vector<std::pair<double, int>>& sorted, int max_excl,
                                  bool low_side) {
  std::vector<Face> out;
  Face cur;
  const size_t n = sorted.size();
  size_t pos = 0;
  while (pos < n) {
    // All points sharing this coordinate move together.
    const double v = low_side ? sorted[pos].first : sorted[n - 1 - pos].first;
    cur.value = v;
    if (cur.excl_count > max_excl) break;
    out.push_back(cur);
    while (pos < n) {
      const auto& entry = low_side ? sorted[pos] : sorted[n - 1 - pos];
      if (entry.first != v) break;
      cur.excluded.set(entry.second);
      ++cur.excl_count;
      ++pos;
    }
  }
  return out;
}

}  // namespace

Cuboid3D oracle_cuboid(const PointCloud& points, double coverage) {
  const size_t n = points.size();
  if (n == 0) throw ValidationError("oracle_cuboid: empty point set");
  if (n > 500) throw ValidationError("oracle_cuboid: more than 500 points");
  if (!(coverage > 0) || coverage > 1) {
    throw ValidationError("oracle_cuboid: coverage not in (0, 1]");
  }
  const int required = static_cast<int>(std::ceil(coverage * static_cast<double>(n)));
  const int k = static_cast<int>(n) - required;

  std::array<std::vector<Face>, 3> lows, highs;
  for (int axis = 0; axis < 3; ++axis) {
    std::vector<std::pair<double, int>> sorted;
    sorted.reserve(n);
    for (size_t i = 0; i < n; ++i) sorted.emplace_back(points.points[i][axis], static_cast<int>(i));
    std::sort(sorted.begin(), sorted.end());
    lows[axis] = face_candidates(sorted, k, true);
    highs[axis] = face_candidates(sorted, k, false);
  }

  double best_obj = std::numeric_limits<double>::infinity();
  int best_included = -1;
  Cuboid3D best;
  bool found = false;

  auto consider = [&](const Cuboid3D& box, double obj, int included) {
    if (found) {
      if (obj > best_obj) return;
      if (obj == best_obj) {
        if (included < best_included) return;
        if (included == best_included) {
          // Lexicographic corner tie-break.
          const double a[6] = {box.min_corner[0], box.min_corner[1], box.min_corner[2],
                               box.max_corner[0], box.max_corner[1], box.max_corner[2]};
          const double b[6] = {best.min_corner[0], best.min_corner[1], best.min_corner[2],
                               best.max_corner[0], best.max_corner[1], best.max_corner[2]};
          if (!std::lexicographical_compare(a, a + 6, b, b + 6)) return;
        }
      }
    }
    best_obj = obj;
    best_included = included;
    best = box;
    found = true;
  };

  for (const Face& lo0 : lows[0]) {
    for (const Face& hi0 : highs[0]) {
      if (lo0.value > hi0.value) continue;
      if (lo0.excl_count + hi0.excl_count > k) continue;
      const Mask m0 = Mask::unite(lo0.excluded, hi0.excluded);
      for (const Face& lo1 : lows[1]) {
        for (const Face& hi1 : highs[1]) {
          if (lo1.value > hi1.value) continue;
          if (lo1.excl_count + hi1.excl_count > k) continue;
          const Mask m1 = Mask::unite(m0, Mask::unite(lo1.excluded, hi1.excluded));
          if (m1.count() > k) continue;
          for (const Face& lo2 : lows[2]) {
            for (const Face& hi2 : highs[2]) {
              if (lo2.value > hi2.value) continue;
              if (lo2.excl_count + hi2.excl_count > k) continue;
              const Mask m2 = Mask::unite(m1, Mask::unite(lo2.excluded, hi2.excluded));
              const int excluded = m2.count();
              if (excluded > k) continue;
              const int included = static_cast<int>(n) - excluded;
              if (included < required) continue;
              const Cuboid3D box{{lo0.value, lo1.value, lo2.value},
                                 {hi0.value, hi1.value, hi2.value}};
              consider(box, box.volume() / included, included);
            }
          }
        }
      }
    }
  }
  // The full AABB is always feasible, so a result exists.
  return best;
}

std::vector<Vec3> oracle_modes(const PointCloud& points, double radius) {
  if (!(radius > 0)) throw ValidationError("oracle_modes: radius must be positive");
  if (points.size() > 2000) throw ValidationError("oracle_modes: more than 2000 points");
  const std::vector<Vec3>& pts = points.points;
  const double r2 = radius * radius;

  std::vector<Vec3> converged;
  converged.reserve(pts.size());
  for (const Vec3& seed : pts) {
    Vec3 m = seed;
    for (int iter = 0; iter < 1000; ++iter) {
      Vec3 sum = Vec3::Zero();
      size_t count = 0;
      for (const Vec3& p : pts) {
        if ((p - m).squaredNorm() <= r2) {
          sum += p;
          ++count;
        }
      }
      if (count == 0) break;
      const Vec3 next = sum / static_cast<double>(count);
      const bool done = (next - m).norm() < 1e-6;
      m = next;
      if (done) break;
    }
    converged.push_back(m);
  }

  // Same greedy merge rule as the implementation under test.
  struct Merged {
    Vec3 sum = Vec3::Zero();
    size_t weight = 0;
  };
  std::vector<Merged> merged;
  const double merge_r = radius / 2.0;
  for (const Vec3& m : converged) {
    bool placed = false;
    for (auto& cand : merged) {
      if ((cand.sum / static_cast<double>(cand.weight) - m).norm() < merge_r) {
        cand.sum += m;
        cand.weight += 1;
        placed = true;
        break;
      }
    }
    if (!placed) merged.push_back({m, 1});
  }
  std::vector<Vec3> modes;
  modes.reserve(merged.size());
  for (const auto& cand : merged) modes.push_back(cand.sum / static_cast<double>(cand.weight));
  return modes;
}

}  // namespace mvp
