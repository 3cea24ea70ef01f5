#include "mvprop/ply_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mvp {

namespace {

[[noreturn]] void fail(const std::string& origin, size_t line, const std::string& msg) {
  throw ParseError(origin + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

PointCloud read_ply(std::istream& in, const std::string& origin) {
  size_t lineno = 0;
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    return false;
  };

  if (!next_line() || line != "ply") fail(origin, lineno, "expected 'ply' magic");

  long long vertex_count = -1;
  bool have_format = false;
  bool in_vertex_element = false;
  std::vector<std::string> props;
  while (true) {
    if (!next_line()) fail(origin, lineno, "unexpected end of header");
    if (line == "end_header") break;
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0] == "comment") continue;
    if (toks[0] == "format") {
      if (toks.size() != 3 || toks[1] != "ascii" || toks[2] != "1.0") {
        fail(origin, lineno, "only 'format ascii 1.0' is supported");
      }
      have_format = true;
    } else if (toks[0] == "element") {
      if (toks.size() != 3) fail(origin, lineno, "malformed element line");
      if (toks[1] != "vertex") fail(origin, lineno, "only 'vertex' elements are supported");
      if (vertex_count >= 0) fail(origin, lineno, "duplicate vertex element");
      try {
        vertex_count = std::stoll(toks[2]);
      } catch (const std::exception&) {
        fail(origin, lineno, "bad vertex count '" + toks[2] + "'");
      }
      if (vertex_count < 0) fail(origin, lineno, "negative vertex count");
      in_vertex_element = true;
    } else if (toks[0] == "property") {
      if (!in_vertex_element) fail(origin, lineno, "property outside vertex element");
      if (toks.size() != 3) fail(origin, lineno, "malformed property line");
      const std::string& type = toks[1];
      const std::string& name = toks[2];
      if (name == "x" || name == "y" || name == "z") {
        if (type != "float" && type != "float32" && type != "double") {
          fail(origin, lineno, "coordinate property must be float");
        }
      } else if (name == "red" || name == "green" || name == "blue") {
        if (type != "uchar" && type != "uint8") fail(origin, lineno, "color property must be uchar");
      } else {
        fail(origin, lineno, "unsupported property '" + name + "'");
      }
      props.push_back(name);
    } else {
      fail(origin, lineno, "unsupported header line '" + line + "'");
    }
  }
  if (!have_format) fail(origin, lineno, "missing format line");
  if (vertex_count < 0) fail(origin, lineno, "missing vertex element");

  const std::vector<std::string> xyz = {"x", "y", "z"};
  const std::vector<std::string> xyzrgb = {"x", "y", "z", "red", "green", "blue"};
  bool with_color;
  if (props == xyz) {
    with_color = false;
  } else if (props == xyzrgb) {
    with_color = true;
  } else {
    fail(origin, lineno, "vertex properties must be x,y,z[,red,green,blue] in order");
  }

  PointCloud cloud;
  cloud.points.reserve(static_cast<size_t>(vertex_count));
  if (with_color) cloud.colors.reserve(static_cast<size_t>(vertex_count));
  for (long long i = 0; i < vertex_count; ++i) {
    if (!next_line()) fail(origin, lineno, "vertex count mismatch: file ends early");
    const auto toks = split_ws(line);
    const size_t want = with_color ? 6 : 3;
    if (toks.size() != want) fail(origin, lineno, "wrong number of values on vertex line");
    double c[3];
    for (int k = 0; k < 3; ++k) {
      try {
        c[k] = std::stod(toks[k]);
      } catch (const std::exception&) {
        fail(origin, lineno, "bad coordinate '" + toks[k] + "'");
      }
      if (!std::isfinite(c[k])) fail(origin, lineno, "non-finite coordinate");
    }
    cloud.points.emplace_back(c[0], c[1], c[2]);
    if (with_color) {
      Rgb rgb;
      uint8_t* ch[3] = {&rgb.r, &rgb.g, &rgb.b};
      for (int k = 0; k < 3; ++k) {
        int v;
        try {
          v = std::stoi(toks[3 + k]);
        } catch (const std::exception&) {
          fail(origin, lineno, "bad color value '" + toks[3 + k] + "'");
        }
        if (v < 0 || v > 255) fail(origin, lineno, "color value out of range");
        *ch[k] = static_cast<uint8_t>(v);
      }
      cloud.colors.push_back(rgb);
    }
  }
  std::string trailing;
  while (std::getline(in, trailing)) {
    ++lineno;
    if (!trailing.empty() && trailing.back() == '\r') trailing.pop_back();
    if (!trailing.empty()) fail(origin, lineno, "trailing data after last vertex");
  }
  return cloud;
}

PointCloud load_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return read_ply(in, path);
}

void write_ply(const PointCloud& cloud, std::ostream& out) {
  if (cloud.has_colors() && cloud.colors.size() != cloud.points.size()) {
    throw ValidationError("cloud colors/points length mismatch");
  }
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << cloud.points.size() << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  if (cloud.has_colors()) {
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  }
  out << "end_header\n";
  char buf[128];
  for (size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3& p = cloud.points[i];
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g", p.x(), p.y(), p.z());
    out << buf;
    if (cloud.has_colors()) {
      const Rgb& c = cloud.colors[i];
      out << ' ' << int(c.r) << ' ' << int(c.g) << ' ' << int(c.b);
    }
    out << '\n';
  }
}

void save_cloud(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  write_ply(cloud, out);
  if (!out) throw ParseError(path + ": write failed");
}

}  // namespace mvp
