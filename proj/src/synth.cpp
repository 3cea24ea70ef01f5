#include "mvprop/synth.hpp"

#include "mvprop/parallel.hpp"
#include "mvprop/pgm_io.hpp"
#include "mvprop/ply_io.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

namespace mvp {

using detail::json;

void SceneSpec::validate() const {
  intrinsics.validate();
  if (cameras.empty()) throw ValidationError("scene spec: at least one camera required");
  for (const Pose& cam : cameras) cam.validate();
  for (const PlaneSpec& pl : planes) {
    if (std::abs(pl.normal.norm() - 1.0) > 1e-6) {
      throw ValidationError("scene spec: plane normal must be unit length");
    }
    if (std::abs(pl.normal.dot(pl.center) - pl.rho) > 1e-6) {
      throw ValidationError("scene spec: plane center must lie on the plane");
    }
    if (!(pl.ext_u > 0) || !(pl.ext_v > 0)) {
      throw ValidationError("scene spec: plane extents must be positive");
    }
  }
  for (const ObjectSpec& obj : objects) {
    if (obj.label.empty()) throw ValidationError("scene spec: object label must be nonempty");
    if (!(obj.size.minCoeff() > 0)) {
      throw ValidationError("scene spec: object sizes must be positive");
    }
  }
  if (depth_noise_sigma < 0) throw ValidationError("scene spec: negative depth noise");
  if (!(segment_spacing > 0)) throw ValidationError("scene spec: segment_spacing must be positive");
  if (!(scale_alpha > 0)) throw ValidationError("scene spec: scale_alpha must be positive");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Deterministic in-plane axes for a plane rectangle.
void plane_axes(const Vec3& normal, Vec3& u, Vec3& v) {
  Vec3 a = normal.cross(Vec3::UnitZ());
  if (a.norm() < 1e-6) a = normal.cross(Vec3::UnitX());
  u = a.normalized();
  v = normal.cross(u);
}

double hit_plane(const PlaneSpec& pl, const Vec3& o, const Vec3& d) {
  const double denom = pl.normal.dot(d);
  if (std::abs(denom) < 1e-12) return kInf;
  const double t = (pl.rho - pl.normal.dot(o)) / denom;
  if (t <= 0) return kInf;
  const Vec3 p = o + t * d;
  Vec3 u, v;
  plane_axes(pl.normal, u, v);
  const Vec3 rel = p - pl.center;
  if (std::abs(rel.dot(u)) > pl.ext_u || std::abs(rel.dot(v)) > pl.ext_v) return kInf;
  return t;
}

double hit_box(const Vec3& lo, const Vec3& hi, const Vec3& o, const Vec3& d) {
  double tmin = 0, tmax = kInf;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(d[k]) < 1e-12) {
      if (o[k] < lo[k] || o[k] > hi[k]) return kInf;
      continue;
    }
    double t0 = (lo[k] - o[k]) / d[k];
    double t1 = (hi[k] - o[k]) / d[k];
    if (t0 > t1) std::swap(t0, t1);
    tmin = std::max(tmin, t0);
    tmax = std::min(tmax, t1);
    if (tmin > tmax) return kInf;
  }
  return tmin > 0 ? tmin : kInf;
}

double hit_cylinder(const ObjectSpec& obj, const Vec3& o, const Vec3& d) {
  const double r = obj.size.x();
  const double zlo = obj.center.z() - obj.size.z() / 2;
  const double zhi = obj.center.z() + obj.size.z() / 2;
  double best = kInf;
  // Lateral surface.
  const double ox = o.x() - obj.center.x(), oy = o.y() - obj.center.y();
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a > 1e-15) {
    const double b = 2 * (ox * d.x() + oy * d.y());
    const double c = ox * ox + oy * oy - r * r;
    const double disc = b * b - 4 * a * c;
    if (disc >= 0) {
      const double sq = std::sqrt(disc);
      for (const double t : {(-b - sq) / (2 * a), (-b + sq) / (2 * a)}) {
        if (t <= 0 || t >= best) continue;
        const double z = o.z() + t * d.z();
        if (z >= zlo && z <= zhi) best = t;
      }
    }
  }
  // Caps.
  if (std::abs(d.z()) > 1e-12) {
    for (const double zc : {zlo, zhi}) {
      const double t = (zc - o.z()) / d.z();
      if (t <= 0 || t >= best) continue;
      const double px = o.x() + t * d.x() - obj.center.x();
      const double py = o.y() + t * d.y() - obj.center.y();
      if (px * px + py * py <= r * r) best = t;
    }
  }
  return best;
}

double hit_object(const ObjectSpec& obj, const Vec3& o, const Vec3& d) {
  if (obj.shape == ShapeKind::Box) {
    return hit_box(obj.center - obj.size / 2, obj.center + obj.size / 2, o, d);
  }
  return hit_cylinder(obj, o, d);
}

// Regular grid over [lo, hi] with at most `spacing` between samples,
// endpoints included.
std::vector<double> grid_1d(double lo, double hi, double spacing) {
  const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / spacing)));
  std::vector<double> out;
  out.reserve(n + 1);
  for (int i = 0; i <= n; ++i) out.push_back(lo + (hi - lo) * i / n);
  return out;
}

PointCloud sample_box_surface(const Vec3& lo, const Vec3& hi, double spacing) {
  PointCloud cloud;
  for (int axis = 0; axis < 3; ++axis) {
    const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
    for (const double face : {lo[axis], hi[axis]}) {
      for (double s1 : grid_1d(lo[a1], hi[a1], spacing)) {
        for (double s2 : grid_1d(lo[a2], hi[a2], spacing)) {
          Vec3 p;
          p[axis] = face;
          p[a1] = s1;
          p[a2] = s2;
          cloud.points.push_back(p);
        }
      }
    }
  }
  return cloud;
}

PointCloud sample_cylinder_surface(const ObjectSpec& obj, double spacing) {
  PointCloud cloud;
  const double r = obj.size.x(), h = obj.size.z();
  const double zlo = obj.center.z() - h / 2, zhi = obj.center.z() + h / 2;
  const int n_ang = std::max(8, static_cast<int>(std::ceil(2 * std::numbers::pi * r / spacing)));
  for (double z : grid_1d(zlo, zhi, spacing)) {
    for (int a = 0; a < n_ang; ++a) {
      const double ang = 2 * std::numbers::pi * a / n_ang;
      cloud.points.emplace_back(obj.center.x() + r * std::cos(ang),
                                obj.center.y() + r * std::sin(ang), z);
    }
  }
  for (const double z : {zlo, zhi}) {
    for (double rr : grid_1d(0, r, spacing)) {
      const int n = std::max(1, static_cast<int>(std::ceil(2 * std::numbers::pi * rr / spacing)));
      for (int a = 0; a < n; ++a) {
        const double ang = 2 * std::numbers::pi * a / n;
        cloud.points.emplace_back(obj.center.x() + rr * std::cos(ang),
                                  obj.center.y() + rr * std::sin(ang), z);
      }
    }
  }
  return cloud;
}

PointCloud sample_plane_surface(const PlaneSpec& pl, double spacing) {
  PointCloud cloud;
  Vec3 u, v;
  plane_axes(pl.normal, u, v);
  for (double su : grid_1d(-pl.ext_u, pl.ext_u, spacing)) {
    for (double sv : grid_1d(-pl.ext_v, pl.ext_v, spacing)) {
      cloud.points.push_back(pl.center + su * u + sv * v);
    }
  }
  return cloud;
}

}  // namespace

SceneTruth generate_scene(const SceneSpec& spec, uint64_t seed) {
  spec.validate();
  const Intrinsics& intr = spec.intrinsics;
  SceneTruth truth;
  truth.frames.resize(spec.cameras.size());

  parallel_for(spec.cameras.size(), [&](size_t f) {
    const Pose& cam = spec.cameras[f];
    FrameTruth& ft = truth.frames[f];
    ft.depth.width = intr.width;
    ft.depth.height = intr.height;
    ft.depth.values.assign(static_cast<size_t>(intr.width) * intr.height, 0);

    // Per-frame noise stream so frame-parallel rendering stays deterministic.
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + f + 1);
    std::normal_distribution<double> noise(0.0, spec.depth_noise_sigma);

    std::vector<int> hit_id(ft.depth.values.size(), -1);
    for (int py = 0; py < intr.height; ++py) {
      for (int px = 0; px < intr.width; ++px) {
        const Vec3 dir_cam((px - intr.cx) / intr.fx, (py - intr.cy) / intr.fy, 1.0);
        const Vec3 d = cam.rotation * dir_cam;  // t equals camera-frame depth
        const Vec3& o = cam.translation;
        double best = kInf;
        int id = -1;
        for (size_t i = 0; i < spec.planes.size(); ++i) {
          const double t = hit_plane(spec.planes[i], o, d);
          if (t < best) {
            best = t;
            id = -static_cast<int>(i) - 2;  // planes: -2, -3, ...
          }
        }
        for (size_t i = 0; i < spec.objects.size(); ++i) {
          const double t = hit_object(spec.objects[i], o, d);
          if (t < best) {
            best = t;
            id = static_cast<int>(i);
          }
        }
        if (!std::isfinite(best)) continue;
        hit_id[static_cast<size_t>(py) * intr.width + px] = id;
        if (spec.max_depth > 0 && best > spec.max_depth) continue;  // out of sensor range
        double depth = best;
        if (spec.depth_noise_sigma > 0) depth += noise(rng);
        const long long mm = std::llround(depth * 1000.0);
        ft.depth.at(px, py) = static_cast<uint16_t>(std::clamp<long long>(mm, 1, 65535));
      }
    }

    // Ground-truth boxes from the rendered visibility masks.
    for (size_t i = 0; i < spec.objects.size(); ++i) {
      int minx = intr.width, maxx = -1, miny = intr.height, maxy = -1;
      size_t count = 0;
      for (int py = 0; py < intr.height; ++py) {
        for (int px = 0; px < intr.width; ++px) {
          if (hit_id[static_cast<size_t>(py) * intr.width + px] != static_cast<int>(i)) continue;
          ++count;
          minx = std::min(minx, px);
          maxx = std::max(maxx, px);
          miny = std::min(miny, py);
          maxy = std::max(maxy, py);
        }
      }
      if (count < static_cast<size_t>(spec.gt_min_pixels)) continue;
      Box2D box;
      box.xmin = minx;
      box.ymin = miny;
      box.xmax = maxx;
      box.ymax = maxy;
      box.label = spec.objects[i].label;
      if (box.width() < spec.gt_min_box_side || box.height() < spec.gt_min_box_side) continue;
      ft.gt_boxes.push_back(std::move(box));
    }
  });

  for (const ObjectSpec& obj : spec.objects) {
    ObjectSegment seg;
    seg.label = obj.label;
    seg.points = obj.shape == ShapeKind::Box
                     ? sample_box_surface(obj.center - obj.size / 2, obj.center + obj.size / 2,
                                          spec.segment_spacing)
                     : sample_cylinder_surface(obj, spec.segment_spacing);
    truth.object_segments.push_back(std::move(seg));
  }
  for (size_t i = 0; i < spec.planes.size(); ++i) {
    ObjectSegment seg;
    seg.label = "plane_" + std::to_string(i);
    seg.points = sample_plane_surface(spec.planes[i], spec.segment_spacing);
    truth.plane_segments.push_back(std::move(seg));
  }
  return truth;
}

SceneSpec load_scene_spec(const std::string& json_path) {
  const json j = detail::load_json(json_path);
  SceneSpec spec;
  const auto& ji = detail::require(j, "intrinsics", json_path);
  spec.intrinsics.fx = detail::require(ji, "fx", json_path).get<double>();
  spec.intrinsics.fy = detail::require(ji, "fy", json_path).get<double>();
  spec.intrinsics.cx = detail::require(ji, "cx", json_path).get<double>();
  spec.intrinsics.cy = detail::require(ji, "cy", json_path).get<double>();
  spec.intrinsics.width = detail::require(ji, "width", json_path).get<int>();
  spec.intrinsics.height = detail::require(ji, "height", json_path).get<int>();
  spec.depth_noise_sigma = j.value("depth_noise_sigma", 0.0);
  spec.max_depth = j.value("max_depth", 0.0);
  spec.segment_spacing = j.value("segment_spacing", 0.005);
  spec.scale_alpha = j.value("scale_alpha", 1.0);
  spec.gt_min_pixels = j.value("gt_min_pixels", 50);
  spec.gt_min_box_side = j.value("gt_min_box_side", 10.0);
  if (j.contains("planes")) {
    for (const auto& jp : j["planes"]) {
      PlaneSpec pl;
      const auto& jn = detail::require(jp, "normal", json_path);
      const auto& jc = detail::require(jp, "center", json_path);
      for (int k = 0; k < 3; ++k) {
        pl.normal[k] = jn[k].get<double>();
        pl.center[k] = jc[k].get<double>();
      }
      pl.rho = detail::require(jp, "rho", json_path).get<double>();
      pl.ext_u = detail::require(jp, "ext_u", json_path).get<double>();
      pl.ext_v = detail::require(jp, "ext_v", json_path).get<double>();
      spec.planes.push_back(pl);
    }
  }
  if (j.contains("objects")) {
    for (const auto& jo : j["objects"]) {
      ObjectSpec obj;
      obj.label = detail::require(jo, "label", json_path).get<std::string>();
      const std::string shape = detail::require(jo, "shape", json_path).get<std::string>();
      if (shape == "box") {
        obj.shape = ShapeKind::Box;
      } else if (shape == "cylinder") {
        obj.shape = ShapeKind::Cylinder;
      } else {
        throw ParseError(json_path + ": unknown shape '" + shape + "'");
      }
      const auto& jc = detail::require(jo, "center", json_path);
      const auto& js = detail::require(jo, "size", json_path);
      for (int k = 0; k < 3; ++k) {
        obj.center[k] = jc[k].get<double>();
        obj.size[k] = js[k].get<double>();
      }
      spec.objects.push_back(std::move(obj));
    }
  }
  for (const auto& jc : detail::require(j, "cameras", json_path)) {
    Pose cam;
    const auto& jr = detail::require(jc, "rotation", json_path);
    const auto& jt = detail::require(jc, "translation", json_path);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) cam.rotation(r, c) = jr[3 * r + c].get<double>();
    }
    for (int k = 0; k < 3; ++k) cam.translation[k] = jt[k].get<double>();
    spec.cameras.push_back(cam);
  }
  spec.validate();
  return spec;
}

void save_scene_spec(const SceneSpec& spec, const std::string& json_path) {
  json j;
  j["intrinsics"] = {{"fx", spec.intrinsics.fx}, {"fy", spec.intrinsics.fy},
                     {"cx", spec.intrinsics.cx}, {"cy", spec.intrinsics.cy},
                     {"width", spec.intrinsics.width}, {"height", spec.intrinsics.height}};
  j["depth_noise_sigma"] = spec.depth_noise_sigma;
  j["max_depth"] = spec.max_depth;
  j["segment_spacing"] = spec.segment_spacing;
  j["scale_alpha"] = spec.scale_alpha;
  j["gt_min_pixels"] = spec.gt_min_pixels;
  j["gt_min_box_side"] = spec.gt_min_box_side;
  json jplanes = json::array();
  for (const PlaneSpec& pl : spec.planes) {
    jplanes.push_back({{"normal", {pl.normal.x(), pl.normal.y(), pl.normal.z()}},
                       {"rho", pl.rho},
                       {"center", {pl.center.x(), pl.center.y(), pl.center.z()}},
                       {"ext_u", pl.ext_u},
                       {"ext_v", pl.ext_v}});
  }
  j["planes"] = std::move(jplanes);
  json jobjects = json::array();
  for (const ObjectSpec& obj : spec.objects) {
    jobjects.push_back({{"label", obj.label},
                        {"shape", obj.shape == ShapeKind::Box ? "box" : "cylinder"},
                        {"center", {obj.center.x(), obj.center.y(), obj.center.z()}},
                        {"size", {obj.size.x(), obj.size.y(), obj.size.z()}}});
  }
  j["objects"] = std::move(jobjects);
  json jcams = json::array();
  for (const Pose& cam : spec.cameras) {
    json jr = json::array();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) jr.push_back(cam.rotation(r, c));
    }
    jcams.push_back({{"rotation", std::move(jr)},
                     {"translation", {cam.translation.x(), cam.translation.y(),
                                      cam.translation.z()}}});
  }
  j["cameras"] = std::move(jcams);
  detail::save_json(j, json_path);
}

void write_scene_dir(const SceneSpec& spec, const SceneTruth& truth, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "segments");

  char idbuf[32];
  Scene scene;
  scene.intrinsics = spec.intrinsics;
  std::vector<FrameBoxes> gt_frames;
  for (size_t f = 0; f < spec.cameras.size(); ++f) {
    std::snprintf(idbuf, sizeof(idbuf), "frame_%03zu", f);
    CameraFrame frame;
    frame.id = idbuf;
    frame.pose = spec.cameras[f];
    frame.pose.translation /= spec.scale_alpha;  // stored in SfM units
    frame.depth_file = std::string("depth_") + idbuf + ".pgm";
    scene.frames.push_back(frame);
    save_depth_pgm(truth.frames[f].depth, (fs::path(out_dir) / frame.depth_file).string());

    FrameBoxes fb;
    fb.frame_id = idbuf;
    for (const Box2D& box : truth.frames[f].gt_boxes) fb.boxes.push_back({box, -1});
    gt_frames.push_back(std::move(fb));
  }
  save_scene(scene, (fs::path(out_dir) / "scene.json").string());
  save_boxes(gt_frames, (fs::path(out_dir) / "gt_boxes.json").string());

  json jlabels = json::array();
  for (const ObjectSegment& seg : truth.object_segments) {
    const std::string file = "segments/" + seg.label + ".ply";
    save_cloud(seg.points, (fs::path(out_dir) / file).string());
    jlabels.push_back({{"label", seg.label}, {"file", file}});
  }
  detail::save_json(json{{"segments", std::move(jlabels)}},
                    (fs::path(out_dir) / "segments" / "labels.json").string());

  // Sparse correspondences at the true scale: Z in SfM units, z metric.
  std::ofstream corr((fs::path(out_dir) / "correspondences.csv").string());
  corr.precision(12);
  for (const FrameTruth& ft : truth.frames) {
    const size_t n = ft.depth.values.size();
    const size_t stride = std::max<size_t>(1, n / 100);
    for (size_t i = 0; i < n; i += stride) {
      if (ft.depth.values[i] == 0) continue;
      const double z = ft.depth.values[i] * 1e-3;
      corr << (z / spec.scale_alpha) << "," << z << "\n";
    }
  }
}

}  // namespace mvp
