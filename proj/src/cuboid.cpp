#include "mvprop/cuboid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace mvp {

double iou_3d(const Cuboid3D& a, const Cuboid3D& b) {
  double inter = 1;
  for (int k = 0; k < 3; ++k) {
    const double lo = std::max(a.min_corner[k], b.min_corner[k]);
    const double hi = std::min(a.max_corner[k], b.max_corner[k]);
    if (hi <= lo) return 0;
    inter *= hi - lo;
  }
  const double uni = a.volume() + b.volume() - inter;
  return uni > 0 ? inter / uni : 0;
}

int count_inside(const PointCloud& cloud, std::span<const int> indices, const Cuboid3D& box) {
  int count = 0;
  for (int i : indices) {
    if (box.contains(cloud.points[i])) ++count;
  }
  return count;
}

namespace {

struct BoxState {
  Vec3 center, half;  // half extents, >= 0
  Cuboid3D cuboid() const { return {center - half, center + half}; }
};

struct Eval {
  double objective = std::numeric_limits<double>::infinity();
  int included = 0;
  bool feasible = false;
};

Eval evaluate(const std::vector<Vec3>& pts, const BoxState& s, int required) {
  Eval e;
  const Cuboid3D box = s.cuboid();
  int count = 0;
  for (const Vec3& p : pts) {
    if (box.contains(p)) ++count;
  }
  e.included = count;
  e.feasible = count >= required;
  if (e.feasible) e.objective = box.volume() / count;
  return e;
}

// a strictly better than b under the tie rule: lower objective wins; within
// 1e-9 relative, more included points win.
bool better(const Eval& a, const Eval& b) {
  if (!a.feasible && !b.feasible) return a.included > b.included;
  if (!a.feasible) return false;
  if (!b.feasible) return true;
  const double scale = std::max({std::abs(a.objective), std::abs(b.objective), 1e-300});
  if (std::abs(a.objective - b.objective) <= 1e-9 * scale) return a.included > b.included;
  return a.objective < b.objective;
}

}  // namespace

Cuboid3D fit_cuboid(const PointCloud& cloud, std::span<const int> indices, double coverage) {
  if (indices.empty()) throw ValidationError("fit_cuboid: empty cluster");
  if (!(coverage > 0) || coverage > 1) throw ValidationError("fit_cuboid: coverage not in (0,1]");
  std::vector<Vec3> pts;
  pts.reserve(indices.size());
  for (int i : indices) pts.push_back(cloud.points[i]);

  Vec3 lo = pts[0], hi = pts[0];
  for (const Vec3& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const int required = static_cast<int>(std::ceil(coverage * static_cast<double>(pts.size())));

  // Exact path for small clusters: the optimal box has every face at some
  // point coordinate, so enumerate per-axis order-statistic cuts within the
  // outlier budget, filtering survivors axis by axis. Falls through to the
  // heuristic when the enumeration would be too expensive.
  {
    const int n = static_cast<int>(pts.size());
    const int b = n - required;
    const double comb = 0.5 * (b + 1) * (b + 2);
    const double est = comb * (n + comb * (n + static_cast<double>(b) * b));
    if (b >= 0 && est <= 150e6) {
      std::vector<Vec3> by_x = pts;
      std::sort(by_x.begin(), by_x.end(),
                [](const Vec3& p, const Vec3& q) { return p.x() < q.x(); });
      Cuboid3D best_box{lo, hi};
      double best_obj = std::numeric_limits<double>::infinity();
      int best_inc = 0;
      std::vector<Vec3> surv_y, surv_z;
      std::vector<double> zs;
      std::vector<int> run_start, run_end;
      for (int i = 0; i <= b; ++i) {
        for (int k = 0; i + k <= b; ++k) {
          const double x_lo = by_x[i].x(), x_hi = by_x[n - 1 - k].x();
          if (x_hi < x_lo) continue;
          surv_y.clear();
          for (const Vec3& p : pts) {
            if (p.x() >= x_lo && p.x() <= x_hi) surv_y.push_back(p);
          }
          std::sort(surv_y.begin(), surv_y.end(),
                    [](const Vec3& p, const Vec3& q) { return p.y() < q.y(); });
          const int m = static_cast<int>(surv_y.size());
          const int rem = b - (n - m);
          if (rem < 0) continue;
          for (int j = 0; j <= rem; ++j) {
            for (int l = 0; j + l <= rem; ++l) {
              const double y_lo = surv_y[j].y(), y_hi = surv_y[m - 1 - l].y();
              if (y_hi < y_lo) continue;
              zs.clear();
              for (const Vec3& p : surv_y) {
                if (p.y() >= y_lo && p.y() <= y_hi) zs.push_back(p.z());
              }
              std::sort(zs.begin(), zs.end());
              const int m2 = static_cast<int>(zs.size());
              const int rem2 = b - (n - m2);
              if (rem2 < 0 || m2 < required) continue;
              // Tie runs let the included count come out in O(1).
              run_start.assign(m2, 0);
              run_end.assign(m2, 0);
              for (int t = 0; t < m2; ++t) {
                run_start[t] = t > 0 && zs[t] == zs[t - 1] ? run_start[t - 1] : t;
              }
              for (int t = m2 - 1; t >= 0; --t) {
                run_end[t] = t + 1 < m2 && zs[t + 1] == zs[t] ? run_end[t + 1] : t;
              }
              const double area = (x_hi - x_lo) * (y_hi - y_lo);
              for (int c = 0; c <= rem2; ++c) {
                for (int d = 0; c + d <= rem2; ++d) {
                  const int hi_idx = m2 - 1 - d;
                  if (hi_idx < c) break;
                  const int included = run_end[hi_idx] - run_start[c] + 1;
                  if (included < required) continue;
                  const double obj = area * (zs[hi_idx] - zs[c]) / included;
                  const double scale = std::max({obj, best_obj, 1e-300});
                  const bool win = std::abs(obj - best_obj) <= 1e-9 * scale
                                       ? included > best_inc
                                       : obj < best_obj;
                  if (win) {
                    best_obj = obj;
                    best_inc = included;
                    best_box = {{x_lo, y_lo, zs[c]}, {x_hi, y_hi, zs[hi_idx]}};
                  }
                }
              }
            }
          }
        }
      }
      // Snap to the included set's tight AABB (count unchanged, volume never
      // grows).
      Vec3 slo = best_box.max_corner, shi = best_box.min_corner;
      bool any = false;
      for (const Vec3& p : pts) {
        if (!best_box.contains(p)) continue;
        slo = slo.cwiseMin(p);
        shi = shi.cwiseMax(p);
        any = true;
      }
      return any ? Cuboid3D{slo, shi} : best_box;
    }
  }

  auto search = [&](BoxState state) {
    Vec3 step = 0.2 * (state.half + Vec3::Constant(1e-3));
    Eval current = evaluate(pts, state, required);
    const double min_step = 1e-4;
    while (step.maxCoeff() >= min_step) {
      bool improved = false;
      BoxState best_state = state;
      Eval best = current;
      for (int axis = 0; axis < 3; ++axis) {
        if (step[axis] <= 0) continue;
        for (const double sign : {1.0, -1.0}) {
          // center shift
          BoxState cand = state;
          cand.center[axis] += sign * step[axis];
          Eval e = evaluate(pts, cand, required);
          if (better(e, best)) {
            best = e;
            best_state = cand;
            improved = true;
          }
          // extent change
          cand = state;
          cand.half[axis] = std::max(0.0, cand.half[axis] + sign * step[axis]);
          e = evaluate(pts, cand, required);
          if (better(e, best)) {
            best = e;
            best_state = cand;
            improved = true;
          }
        }
      }
      if (improved) {
        state = best_state;
        current = best;
      } else {
        step *= 0.5;
      }
    }

    // Snap to the tight AABB of the included set: same count, never more
    // volume, so the objective only improves.
    const Cuboid3D box = state.cuboid();
    Vec3 slo = lo, shi = hi;
    bool first = true;
    for (const Vec3& p : pts) {
      if (!box.contains(p)) continue;
      if (first) {
        slo = shi = p;
        first = false;
      } else {
        slo = slo.cwiseMin(p);
        shi = shi.cwiseMax(p);
      }
    }
    const Cuboid3D snapped = first ? Cuboid3D{lo, hi} : Cuboid3D{slo, shi};
    Eval e;
    e.included = count_inside(cloud, indices, snapped);
    e.feasible = e.included >= required;
    e.objective = e.feasible ? snapped.volume() / e.included
                             : std::numeric_limits<double>::infinity();
    return std::pair<Cuboid3D, Eval>(snapped, e);
  };

  // Two deterministic starts: the full AABB, and the box of per-axis
  // shortest intervals each excluding at most the outlier budget. The second
  // lands near the optimum when outliers inflate the AABB.
  const int budget = static_cast<int>(pts.size()) - required;
  BoxState trimmed{0.5 * (lo + hi), 0.5 * (hi - lo)};
  if (budget > 0) {
    for (int axis = 0; axis < 3; ++axis) {
      std::vector<double> coords(pts.size());
      for (size_t i = 0; i < pts.size(); ++i) coords[i] = pts[i][axis];
      std::sort(coords.begin(), coords.end());
      const size_t n = coords.size();
      double best_lo = coords.front(), best_hi = coords.back();
      for (int j = 0; j <= budget; ++j) {
        const double a = coords[j], b = coords[n - 1 - (budget - j)];
        if (b - a < best_hi - best_lo) {
          best_lo = a;
          best_hi = b;
        }
      }
      trimmed.center[axis] = 0.5 * (best_lo + best_hi);
      trimmed.half[axis] = 0.5 * (best_hi - best_lo);
    }
  }

  auto [box_a, eval_a] = search(BoxState{0.5 * (lo + hi), 0.5 * (hi - lo)});
  if (budget == 0) return box_a;
  auto [box_b, eval_b] = search(trimmed);
  Cuboid3D best_box = better(eval_b, eval_a) ? box_b : box_a;
  Eval best_eval = better(eval_b, eval_a) ? eval_b : eval_a;

  // Third start: greedy peel chain. Repeatedly drop the face-extreme point
  // whose removal most lowers volume-per-point, keeping the chain state with
  // the best estimate. Finds the discrete optimum structure that the two
  // continuous starts can miss when several outliers share a direction.
  {
    const int n = static_cast<int>(pts.size());
    std::array<std::vector<int>, 3> order;
    for (int a = 0; a < 3; ++a) {
      order[a].resize(n);
      for (int i = 0; i < n; ++i) order[a][i] = i;
      std::sort(order[a].begin(), order[a].end(), [&](int x, int y) {
        if (pts[x][a] != pts[y][a]) return pts[x][a] < pts[y][a];
        return x < y;
      });
    }
    std::vector<char> removed(n, 0);
    std::array<int, 3> head = {0, 0, 0}, tail = {n - 1, n - 1, n - 1};
    const auto adv = [&] {
      for (int a = 0; a < 3; ++a) {
        while (removed[order[a][head[a]]]) ++head[a];
        while (removed[order[a][tail[a]]]) --tail[a];
      }
    };
    // Next unremoved position after/before pos in axis order, skipping skip_id.
    const auto next_lo = [&](int a, int skip_id) {
      int k = head[a];
      while (removed[order[a][k]] || order[a][k] == skip_id) ++k;
      return pts[order[a][k]][a];
    };
    const auto next_hi = [&](int a, int skip_id) {
      int k = tail[a];
      while (removed[order[a][k]] || order[a][k] == skip_id) --k;
      return pts[order[a][k]][a];
    };
    int n_in = n;
    BoxState peel_best{0.5 * (lo + hi), 0.5 * (hi - lo)};
    double peel_best_obj = (hi - lo).prod() / n;
    while (n_in - 1 >= required && n_in > 1) {
      adv();
      double best_score = std::numeric_limits<double>::infinity();
      int best_face = -1;
      for (int face = 0; face < 6; ++face) {
        const int a = face / 2;
        const bool high = face % 2;
        const int q = high ? order[a][tail[a]] : order[a][head[a]];
        Vec3 blo, bhi;
        for (int b = 0; b < 3; ++b) {
          blo[b] = order[b][head[b]] == q ? next_lo(b, q) : pts[order[b][head[b]]][b];
          bhi[b] = order[b][tail[b]] == q ? next_hi(b, q) : pts[order[b][tail[b]]][b];
        }
        const double score = (bhi - blo).prod() / (n_in - 1);
        if (score < best_score) {
          best_score = score;
          best_face = face;
        }
      }
      const int a = best_face / 2;
      const int q = best_face % 2 ? order[a][tail[a]] : order[a][head[a]];
      removed[q] = 1;
      --n_in;
      adv();
      Vec3 blo, bhi;
      for (int b = 0; b < 3; ++b) {
        blo[b] = pts[order[b][head[b]]][b];
        bhi[b] = pts[order[b][tail[b]]][b];
      }
      const double obj = (bhi - blo).prod() / n_in;
      if (obj < peel_best_obj) {
        peel_best_obj = obj;
        peel_best = BoxState{0.5 * (blo + bhi), 0.5 * (bhi - blo)};
      }
    }
    auto [box_c, eval_c] = search(peel_best);
    if (better(eval_c, best_eval)) {
      best_eval = eval_c;
      best_box = box_c;
    }
  }
  return best_box;
}

}  // namespace mvp
