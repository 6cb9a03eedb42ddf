// Small IO/formatting helpers shared by reports and the CLI. All floating
// point output uses 17 significant digits so round-trips are lossless, and
// files are written with LF line endings regardless of platform.
#pragma once

#include <cstdio>
#include <filesystem>
#include <string>

namespace bealab {

inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace bealab
