#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

namespace vforge {

// Insertion-ordered documents; canonical output depends on key order.
using Json = nlohmann::ordered_json;

/// Parses text, mapping syntax errors onto Error{"MalformedDocument"}.
Json parse_json(std::string_view text);

/// Compact single-line rendering used for every canonical artifact.
std::string dump_compact(const Json& j);

/// Two-space indented rendering with trailing newline for files meant to be read.
std::string dump_pretty(const Json& j);

/// 64-bit FNV-1a; used for content digests and deterministic ids.
std::uint64_t fnv1a64(std::string_view bytes);

std::string hex64(std::uint64_t v);

}  // namespace vforge
