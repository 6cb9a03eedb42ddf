#include "bealab/io.hpp"

#include <fstream>
#include <stdexcept>

namespace bealab {

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);  // LF endings, verbatim bytes
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace bealab
