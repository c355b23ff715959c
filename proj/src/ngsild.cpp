#include "vforge/ngsild.hpp"

#include <algorithm>
#include <array>
#include <regex>
#include <set>

#include "vforge/error.hpp"

namespace vforge::ngsild {

namespace {

constexpr std::array<std::string_view, 6> kReservedEntityKeys = {
    "id", "type", "createdAt", "modifiedAt", "deletedAt", "scope"};

// Keys NGSI-LD reserves at attribute level that this format does not model.
constexpr std::array<std::string_view, 5> kUnsupportedAttributeKeys = {
    "datasetId", "createdAt", "modifiedAt", "instanceId", "deletedAt"};

void validate_attribute_name(std::string_view name) {
  if (name.empty()) fail("MalformedDocument", "empty attribute name");
  if (name == "id" || name == "type") {
    fail("ReservedName", "attribute name '" + std::string(name) + "' is reserved");
  }
}

}  // namespace

EntityId::EntityId(std::string value) : value_(std::move(value)) {
  if (value_.empty() || value_.find(':') == std::string::npos) {
    fail("InvalidEntityId", "entity id must be a URI: '" + value_ + "'");
  }
}

EntityId EntityId::canonical(std::string_view type, std::string_view suffix) {
  std::string v = "urn:ngsi-ld:";
  v.append(type).append(":").append(suffix);
  return EntityId(std::move(v));
}

std::string EntityId::last_segment() const {
  auto pos = value_.rfind(':');
  return value_.substr(pos + 1);
}

Attribute Attribute::property(Json value) {
  Attribute a;
  a.kind = AttributeKind::Property;
  a.value = std::move(value);
  return a;
}

Attribute Attribute::relationship(EntityId object) {
  Attribute a;
  a.kind = AttributeKind::Relationship;
  a.object = std::move(object);
  return a;
}

bool operator==(const Attribute& a, const Attribute& b) {
  return a.kind == b.kind && a.value == b.value && a.object == b.object &&
         a.observed_at == b.observed_at && a.unit_code == b.unit_code &&
         a.sub_attributes == b.sub_attributes;
}

bool operator==(const NamedAttribute& a, const NamedAttribute& b) {
  return a.name == b.name && a.attribute == b.attribute;
}

const Attribute* Entity::find(std::string_view name) const {
  for (const auto& na : attributes) {
    if (na.name == name) return &na.attribute;
  }
  return nullptr;
}

bool is_iso8601_with_zone(std::string_view text) {
  static const std::regex re(
      R"(^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d+)?(Z|[+-]\d{2}:\d{2})$)");
  return std::regex_match(text.begin(), text.end(), re);
}

bool is_reserved_entity_key(std::string_view key) {
  if (!key.empty() && key.front() == '@') return true;
  return std::find(kReservedEntityKeys.begin(), kReservedEntityKeys.end(), key) !=
         kReservedEntityKeys.end();
}

Attribute attribute_from_json(std::string_view name, const Json& doc) {
  const std::string where = "attribute '" + std::string(name) + "'";
  if (!doc.is_object()) fail("MalformedDocument", where + " is not an object");

  const bool has_value = doc.contains("value");
  const bool has_object = doc.contains("object");
  if (has_value && has_object) {
    fail("AmbiguousAttribute", where + " carries both value and object");
  }
  auto type_it = doc.find("type");
  if (type_it == doc.end()) fail("MissingField", where + " has no type");
  if (!type_it->is_string()) fail("MalformedDocument", where + " type is not text");
  const auto& type = type_it->get_ref<const std::string&>();

  Attribute a;
  if (type == "Property") {
    if (!has_value) fail("MissingField", where + " is a Property without value");
    a.kind = AttributeKind::Property;
    a.value = doc.at("value");
  } else if (type == "Relationship") {
    if (!has_object) fail("MissingField", where + " is a Relationship without object");
    const auto& obj = doc.at("object");
    if (!obj.is_string()) fail("MalformedDocument", where + " object is not text");
    a.kind = AttributeKind::Relationship;
    try {
      a.object = EntityId(obj.get<std::string>());
    } catch (const Error& e) {
      fail("MalformedDocument", where + ": " + e.what());
    }
  } else {
    fail("MalformedDocument", where + " has unsupported type '" + type + "'");
  }
  if (a.is_property() && has_object) {
    fail("MalformedDocument", where + " is a Property with an object");
  }
  if (!a.is_property() && has_value) {
    fail("MalformedDocument", where + " is a Relationship with a value");
  }

  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    if (key == "type" || key == "value" || key == "object") continue;
    if (key == "observedAt") {
      if (!it->is_string() || !is_iso8601_with_zone(it->get_ref<const std::string&>())) {
        fail("MalformedDocument", where + " observedAt is not an ISO-8601 timestamp with zone");
      }
      a.observed_at = it->get<std::string>();
    } else if (key == "unitCode") {
      if (!it->is_string()) fail("MalformedDocument", where + " unitCode is not text");
      a.unit_code = it->get<std::string>();
    } else if (key.front() == '@' ||
               std::find(kUnsupportedAttributeKeys.begin(), kUnsupportedAttributeKeys.end(),
                         key) != kUnsupportedAttributeKeys.end()) {
      fail("MalformedDocument", where + " uses unsupported reserved key '" + key + "'");
    } else {
      validate_attribute_name(key);
      a.sub_attributes.push_back({key, attribute_from_json(key, *it)});
    }
  }
  return a;
}

Entity entity_from_json(const Json& doc) {
  if (!doc.is_object()) fail("MalformedDocument", "entity document is not an object");
  auto id_it = doc.find("id");
  auto type_it = doc.find("type");
  if (id_it == doc.end()) fail("MissingField", "entity has no id");
  if (type_it == doc.end()) fail("MissingField", "entity has no type");
  if (!id_it->is_string()) fail("MalformedDocument", "entity id is not text");

  Entity e;
  try {
    e.id = EntityId(id_it->get<std::string>());
  } catch (const Error& err) {
    fail("MalformedDocument", err.what());
  }

  if (type_it->is_string()) {
    e.types.push_back(type_it->get<std::string>());
  } else if (type_it->is_array() && !type_it->empty()) {
    std::set<std::string> seen;
    for (const auto& t : *type_it) {
      if (!t.is_string()) fail("MalformedDocument", "entity type entries must be text");
      if (!seen.insert(t.get<std::string>()).second) {
        fail("MalformedDocument", "duplicate entity type '" + t.get<std::string>() + "'");
      }
      e.types.push_back(t.get<std::string>());
    }
  } else {
    fail("MalformedDocument", "entity type must be text or a non-empty list");
  }
  for (const auto& t : e.types) {
    if (t.empty()) fail("MalformedDocument", "empty entity type");
  }

  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    if (key == "id" || key == "type") continue;
    if (is_reserved_entity_key(key)) {
      fail("MalformedDocument", "unsupported reserved key '" + key + "'");
    }
    e.attributes.push_back({key, attribute_from_json(key, *it)});
  }
  return e;
}

Entity parse_entity(std::string_view document) {
  return entity_from_json(parse_json(document));
}

Json attribute_to_json(const Attribute& a) {
  Json j = Json::object();
  if (a.is_property()) {
    j["type"] = "Property";
    j["value"] = a.value;
  } else {
    j["type"] = "Relationship";
    j["object"] = a.object->str();
  }
  if (a.observed_at) j["observedAt"] = *a.observed_at;
  if (a.unit_code) j["unitCode"] = *a.unit_code;
  for (const auto& sub : a.sub_attributes) j[sub.name] = attribute_to_json(sub.attribute);
  return j;
}

Json entity_to_json(const Entity& e) {
  Json j = Json::object();
  j["id"] = e.id.str();
  if (e.types.size() == 1) {
    j["type"] = e.types.front();
  } else {
    j["type"] = e.types;
  }
  for (const auto& na : e.attributes) j[na.name] = attribute_to_json(na.attribute);
  return j;
}

std::string serialize_entity(const Entity& e) { return dump_compact(entity_to_json(e)); }

Entity apply_update(Entity e, std::string_view name, Attribute a) {
  validate_attribute_name(name);
  for (auto& na : e.attributes) {
    if (na.name == name) {
      na.attribute = std::move(a);
      return e;
    }
  }
  e.attributes.push_back({std::string(name), std::move(a)});
  return e;
}

std::vector<Entity> parse_batch(std::string_view text) {
  std::vector<Entity> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      out.push_back(parse_entity(line));
    }
    start = end + 1;
  }
  return out;
}

std::string serialize_batch(const std::vector<Entity>& entities) {
  std::string out;
  for (const auto& e : entities) {
    out += serialize_entity(e);
    out += '\n';
  }
  return out;
}

ContextMap::ContextMap()
    : ContextMap({
          {"Property", "https://uri.etsi.org/ngsi-ld/Property"},
          {"Relationship", "https://uri.etsi.org/ngsi-ld/Relationship"},
          {"GeoProperty", "https://uri.etsi.org/ngsi-ld/GeoProperty"},
          {"observedAt", "https://uri.etsi.org/ngsi-ld/observedAt"},
          {"unitCode", "https://uri.etsi.org/ngsi-ld/unitCode"},
          {"location", "https://uri.etsi.org/ngsi-ld/location"},
          {"value", "https://uri.etsi.org/ngsi-ld/hasValue"},
          {"object", "https://uri.etsi.org/ngsi-ld/hasObject"},
      }) {}

ContextMap::ContextMap(std::map<std::string, std::string> terms) {
  for (auto& [term, iri] : terms) define(term, iri);
}

void ContextMap::define(std::string term, std::string iri) {
  if (auto old = terms_.find(term); old != terms_.end()) reverse_.erase(old->second);
  reverse_[iri] = term;
  terms_[std::move(term)] = std::move(iri);
}

std::string ContextMap::expand(std::string_view term) const {
  if (auto it = terms_.find(std::string(term)); it != terms_.end()) return it->second;
  if (term.find(':') != std::string_view::npos) return std::string(term);
  return std::string(kDefaultVocab) + std::string(term);
}

std::string ContextMap::compact(std::string_view iri) const {
  if (auto it = reverse_.find(std::string(iri)); it != reverse_.end()) return it->second;
  if (iri.substr(0, kDefaultVocab.size()) == kDefaultVocab) {
    return std::string(iri.substr(kDefaultVocab.size()));
  }
  return std::string(iri);
}

}  // namespace vforge::ngsild
