#include "vforge/io.hpp"

#include <fstream>
#include <sstream>

#include "vforge/error.hpp"

namespace vforge::io {

std::string read_file(const std::filesystem::path& path, const std::string& not_found_code) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(not_found_code, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail("WriteFailed", "cannot write " + path.string());
  out << content;
}

std::vector<Json> parse_json_lines(const std::string& text) {
  std::vector<Json> docs;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    docs.push_back(parse_json(line));
  }
  return docs;
}

std::vector<Json> read_json_lines(const std::filesystem::path& path) {
  return parse_json_lines(read_file(path));
}

}  // namespace vforge::io
