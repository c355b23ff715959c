#include "vforge/flavours.hpp"

#include "vforge/error.hpp"

namespace vforge::platform {

using ngsild::Attribute;
using ngsild::Entity;

std::string_view flavour_name(Flavour f) {
  switch (f) {
    case Flavour::OneM2M: return "onem2m";
    case Flavour::NgsiV2: return "ngsiv2";
    case Flavour::NgsiLd: return "ngsild";
    case Flavour::Mqtt: return "mqtt";
  }
  return "";
}

Flavour parse_flavour(std::string_view name) {
  for (auto f : {Flavour::OneM2M, Flavour::NgsiV2, Flavour::NgsiLd, Flavour::Mqtt}) {
    if (flavour_name(f) == name) return f;
  }
  fail("UnknownFlavour", "unsupported vSilo flavour '" + std::string(name) + "'");
}

std::string sanitize(std::string_view text) {
  std::string out(text);
  for (auto& c : out) {
    if (c == '/' || c == ':') c = '_';
  }
  return out;
}

std::string_view ngsiv2_type_of(const Json& value) {
  if (value.is_number()) return "Number";
  if (value.is_boolean()) return "Boolean";
  if (value.is_string()) {
    return ngsild::is_iso8601_with_zone(value.get_ref<const std::string&>()) ? "DateTime" : "Text";
  }
  return "StructuredValue";
}

Json convert_to_ngsiv2(const Entity& e) {
  Json doc = Json::object();
  doc["id"] = e.id.str();
  doc["type"] = e.types.empty() ? std::string() : e.types.front();
  for (const auto& na : e.attributes) {
    const Attribute& a = na.attribute;
    Json metadata = Json::object();
    if (a.observed_at) metadata["timestamp"] = {{"type", "DateTime"}, {"value", *a.observed_at}};
    if (a.unit_code) metadata["unitCode"] = {{"type", "Text"}, {"value", *a.unit_code}};
    for (const auto& sub : a.sub_attributes) {
      const Attribute& s = sub.attribute;
      if (s.is_property()) {
        metadata[sub.name] = {{"type", ngsiv2_type_of(s.value)}, {"value", s.value}};
      } else {
        metadata[sub.name] = {{"type", "Relationship"}, {"value", s.object->str()}};
      }
    }
    Json attr = Json::object();
    if (a.is_property()) {
      attr["type"] = ngsiv2_type_of(a.value);
      attr["value"] = a.value;
      attr["metadata"] = std::move(metadata);
    } else {
      attr["type"] = "Relationship";
      attr["value"] = a.object->str();
      if (!metadata.empty()) attr["metadata"] = std::move(metadata);
    }
    doc[na.name] = std::move(attr);
  }
  return doc;
}

Entity convert_from_ngsiv2(const Json& doc) {
  if (!doc.is_object()) fail("MalformedDocument", "NGSIv2 entity must be an object");
  if (!doc.contains("id") || !doc["id"].is_string()) fail("MissingField", "NGSIv2 entity lacks id");
  if (!doc.contains("type") || !doc["type"].is_string()) {
    fail("MissingField", "NGSIv2 entity lacks type");
  }
  Entity e;
  e.id = ngsild::EntityId(doc["id"].get<std::string>());
  e.types.push_back(doc["type"].get<std::string>());
  for (const auto& [name, attr] : doc.items()) {
    if (name == "id" || name == "type") continue;
    if (!attr.is_object() || !attr.contains("type") || !attr.contains("value")) {
      fail("MalformedDocument", "NGSIv2 attribute '" + name + "' needs type and value");
    }
    Attribute a;
    if (attr["type"] == "Relationship") {
      a = Attribute::relationship(ngsild::EntityId(attr["value"].get<std::string>()));
    } else {
      a = Attribute::property(attr["value"]);
    }
    if (attr.contains("metadata")) {
      for (const auto& [key, meta] : attr["metadata"].items()) {
        if (!meta.is_object() || !meta.contains("value")) {
          fail("MalformedDocument", "NGSIv2 metadata '" + key + "' needs a value");
        }
        if (key == "timestamp") {
          a.observed_at = meta["value"].get<std::string>();
        } else if (key == "unitCode") {
          a.unit_code = meta["value"].get<std::string>();
        } else if (meta.value("type", "") == "Relationship") {
          a.sub_attributes.push_back(
              {key, Attribute::relationship(ngsild::EntityId(meta["value"].get<std::string>()))});
        } else {
          a.sub_attributes.push_back({key, Attribute::property(meta["value"])});
        }
      }
    }
    e.attributes.push_back({name, std::move(a)});
  }
  return e;
}

std::string_view op_kind_name(OneM2MOpKind k) {
  switch (k) {
    case OneM2MOpKind::EnsureAE: return "ensure-AE";
    case OneM2MOpKind::EnsureContainer: return "ensure-Container";
    case OneM2MOpKind::CreateContentInstance: return "create-ContentInstance";
  }
  return "";
}

Json OneM2MResourceOp::to_json() const {
  Json j = {{"opKind", op_kind_name(kind)}, {"parentPath", parent_path}, {"resourceName", resource_name}};
  if (content) j["content"] = *content;
  return j;
}

std::vector<OneM2MResourceOp> convert_to_onem2m(const Entity& e, std::string_view tenant_id,
                                                std::string_view vthing_id) {
  using K = OneM2MOpKind;
  std::vector<OneM2MResourceOp> ops;
  const std::string root(kCseRoot);
  const std::string ae = sanitize(vthing_id);
  const std::string container = sanitize(e.id.str());
  ops.push_back({K::EnsureAE, root, ae, "tenant:" + std::string(tenant_id)});
  const std::string ae_path = root + "/" + ae;
  ops.push_back({K::EnsureContainer, ae_path, container, std::nullopt});
  const std::string entity_path = ae_path + "/" + container;
  for (const auto& na : e.attributes) {
    ops.push_back({K::EnsureContainer, entity_path, na.name, std::nullopt});
    ops.push_back({K::CreateContentInstance, entity_path + "/" + na.name, "",
                   dump_compact(ngsild::attribute_to_json(na.attribute))});
  }
  return ops;
}

namespace {

// Topic levels must not be empty or contain wildcard characters.
std::string topic_level(std::string_view text) {
  std::string out = sanitize(text);
  for (auto& c : out) {
    if (c == '+' || c == '#') c = '_';
  }
  return out.empty() ? "_" : out;
}

}  // namespace

std::vector<MqttRecord> convert_to_mqtt_records(const Entity& e, std::string_view tenant_id,
                                                std::string_view vthing_id) {
  std::vector<MqttRecord> out;
  const std::string prefix = "vSilo/" + topic_level(tenant_id) + "/" + topic_level(vthing_id) + "/" +
                             topic_level(e.id.last_segment()) + "/";
  for (const auto& na : e.attributes) {
    out.push_back({prefix + topic_level(na.name), dump_compact(ngsild::attribute_to_json(na.attribute))});
  }
  return out;
}

}  // namespace vforge::platform
