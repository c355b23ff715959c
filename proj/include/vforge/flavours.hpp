#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vforge/document.hpp"
#include "vforge/ngsild.hpp"

namespace vforge::platform {

enum class Flavour { OneM2M, NgsiV2, NgsiLd, Mqtt };

std::string_view flavour_name(Flavour f);
/// Throws UnknownFlavour.
Flavour parse_flavour(std::string_view name);

/// Replaces '/' and ':' with '_' so ids can be used as resource names and topic levels.
std::string sanitize(std::string_view text);

/// Flat NGSIv2 document. Entities must carry a single type.
Json convert_to_ngsiv2(const ngsild::Entity& e);
/// Inverse of convert_to_ngsiv2 on entities without nested sub-attributes.
ngsild::Entity convert_from_ngsiv2(const Json& doc);
/// NGSIv2 attribute type for a property value.
std::string_view ngsiv2_type_of(const Json& value);

inline constexpr std::string_view kCseRoot = "cse-in";

enum class OneM2MOpKind { EnsureAE, EnsureContainer, CreateContentInstance };

std::string_view op_kind_name(OneM2MOpKind k);

struct OneM2MResourceOp {
  OneM2MOpKind kind = OneM2MOpKind::EnsureAE;
  std::string parent_path;
  std::string resource_name;  // empty for content instances: the store names them
  std::optional<std::string> content;

  Json to_json() const;
  friend bool operator==(const OneM2MResourceOp&, const OneM2MResourceOp&) = default;
};

/// AE -> entity container -> (attribute container, content instance) per attribute.
std::vector<OneM2MResourceOp> convert_to_onem2m(const ngsild::Entity& e, std::string_view tenant_id,
                                                std::string_view vthing_id);

struct MqttRecord {
  std::string topic;
  std::string payload;

  friend bool operator==(const MqttRecord&, const MqttRecord&) = default;
};

/// One record per attribute on `vSilo/{tenant}/{vThing}/{lastSegment}/{attr}`.
std::vector<MqttRecord> convert_to_mqtt_records(const ngsild::Entity& e, std::string_view tenant_id,
                                                std::string_view vthing_id);

}  // namespace vforge::platform
