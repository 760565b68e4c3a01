#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include "peakfit/errors.hpp"

namespace peakfit::csv {

// Round-trip exact, and byte-stable across runs and worker counts.
inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  return os;
}

}  // namespace peakfit::csv
