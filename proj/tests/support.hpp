#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "vforge/bus.hpp"
#include "vforge/document.hpp"
#include "vforge/ngsild.hpp"

namespace vforge::test {

/// Scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
  explicit TempDir(std::string_view tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

/// Segment-by-segment recursive matcher written straight from the MQTT rules.
bool oracle_topic_matches(const std::vector<std::string>& filter, std::size_t fi,
                          const std::vector<std::string>& topic, std::size_t ti);

/// Textbook full-table Levenshtein distance.
std::size_t oracle_edit_distance(const std::string& a, const std::string& b);

/// Random entity drawn from a small vocabulary with nested sub-attributes.
ngsild::Entity random_entity(std::mt19937_64& rng, bool allow_sub_attributes = true);

/// Random filter/topic over a three-letter alphabet so that matches are frequent.
std::vector<std::string> random_topic_segments(std::mt19937_64& rng);
std::vector<std::string> random_filter_segments(std::mt19937_64& rng);

std::string read_text(const std::filesystem::path& p);

/// Golden file comparison. With VFORGE_UPDATE_GOLDEN=1 set, rewrites the file instead.
bool matches_golden(const std::string& name, const std::string& actual);

std::filesystem::path golden_dir();

/// Canonical Car/speed and Camera/attachedTo entities.
ngsild::Entity car_entity();
ngsild::Entity camera_entity();

}  // namespace vforge::test
