#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vforge/document.hpp"

namespace vforge::io {

/// Reads a whole file; throws Error{not_found_code} when it cannot be opened.
std::string read_file(const std::filesystem::path& path,
                      const std::string& not_found_code = "FileNotFound");

/// Writes atomically enough for our purposes (truncate + write); creates parent dirs.
void write_file(const std::filesystem::path& path, const std::string& content);

/// One JSON document per non-blank line.
std::vector<Json> read_json_lines(const std::filesystem::path& path);
std::vector<Json> parse_json_lines(const std::string& text);

}  // namespace vforge::io
