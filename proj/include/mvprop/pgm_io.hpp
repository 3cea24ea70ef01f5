#pragma once

#include "mvprop/types.hpp"

namespace mvp {

// Binary PGM (P5), maxval 65535, big-endian samples. Units are millimeters.

DepthMap load_depth_pgm(const std::string& path);
void save_depth_pgm(const DepthMap& depth, const std::string& path);

}  // namespace mvp
