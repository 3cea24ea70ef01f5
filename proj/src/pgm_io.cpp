#include "mvprop/pgm_io.hpp"

#include <fstream>

namespace mvp {

namespace {

// Reads the next whitespace/comment-delimited header token.
std::string next_token(std::istream& in, const std::string& path) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw ParseError(path + ": truncated PGM header");
  return tok;
}

int parse_int(const std::string& tok, const std::string& path, const char* what) {
  try {
    size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(path + ": bad PGM " + what + " '" + tok + "'");
  }
}

}  // namespace

DepthMap load_depth_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  if (next_token(in, path) != "P5") throw ParseError(path + ": not a binary PGM (P5)");
  DepthMap d;
  d.width = parse_int(next_token(in, path), path, "width");
  d.height = parse_int(next_token(in, path), path, "height");
  const int maxval = parse_int(next_token(in, path), path, "maxval");
  if (d.width <= 0 || d.height <= 0) throw ParseError(path + ": bad PGM dimensions");
  if (maxval != 65535) throw ParseError(path + ": depth PGM must have maxval 65535");
  // The single whitespace byte after maxval was already consumed by next_token.
  const size_t n = static_cast<size_t>(d.width) * d.height;
  std::vector<unsigned char> raw(n * 2);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<size_t>(in.gcount()) != raw.size()) {
    throw ParseError(path + ": truncated PGM pixel data");
  }
  d.values.resize(n);
  for (size_t i = 0; i < n; ++i) {
    d.values[i] = static_cast<uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);  // big-endian
  }
  return d;
}

void save_depth_pgm(const DepthMap& depth, const std::string& path) {
  if (depth.values.size() != static_cast<size_t>(depth.width) * depth.height) {
    throw ValidationError("depth map values length does not match dimensions");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  out << "P5\n" << depth.width << " " << depth.height << "\n65535\n";
  std::vector<unsigned char> raw(depth.values.size() * 2);
  for (size_t i = 0; i < depth.values.size(); ++i) {
    raw[2 * i] = static_cast<unsigned char>(depth.values[i] >> 8);
    raw[2 * i + 1] = static_cast<unsigned char>(depth.values[i] & 0xff);
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw ParseError(path + ": write failed");
}

}  // namespace mvp
