#pragma once

#include "mvprop/types.hpp"

#include <iosfwd>

namespace mvp {

// ASCII PLY, element "vertex" with float x,y,z and optional uchar
// red,green,blue. Nothing else is accepted.

PointCloud load_cloud(const std::string& path);
PointCloud read_ply(std::istream& in, const std::string& origin = "<stream>");

void save_cloud(const PointCloud& cloud, const std::string& path);
void write_ply(const PointCloud& cloud, std::ostream& out);

}  // namespace mvp
