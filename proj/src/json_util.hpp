#pragma once

#include "mvprop/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>

namespace mvp::detail {

using json = nlohmann::json;

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return j;
}

inline void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  out << j.dump(2) << "\n";
  if (!out) throw ParseError(path + ": write failed");
}

inline const json& require(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(ctx + ": missing key '" + key + "'");
  return *it;
}

}  // namespace mvp::detail
