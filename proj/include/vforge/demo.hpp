#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "vforge/document.hpp"

namespace vforge::demo {

struct DemoOptions {
  std::filesystem::path out;
  std::optional<std::int64_t> epoch;
  std::uint64_t seed = 42;  // synthetic benchmark seed
};

/// Bundled fixtures through schema inference, matching, auto-approved review and
/// compilation, then replay through the platform into one vSilo per flavour.
/// Everything is written below `options.out`; returns the summary document.
Json run_demo(const DemoOptions& options);

/// Root concept name used for the bundled weather samples.
inline constexpr const char* kWeatherRoot = "weatherObserved";

}  // namespace vforge::demo
