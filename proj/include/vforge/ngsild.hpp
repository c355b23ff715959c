#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vforge/document.hpp"

namespace vforge::ngsild {

/// URI identifying an entity. Must carry a scheme (at least one ':').
class EntityId {
public:
  EntityId() = default;
  explicit EntityId(std::string value);

  /// `urn:ngsi-ld:{type}:{suffix}`
  static EntityId canonical(std::string_view type, std::string_view suffix);

  const std::string& str() const noexcept { return value_; }
  /// Text after the last ':' (`urn:ngsi-ld:Car:1` -> `1`).
  std::string last_segment() const;

  friend bool operator==(const EntityId&, const EntityId&) = default;
  friend auto operator<=>(const EntityId&, const EntityId&) = default;

private:
  std::string value_;
};

enum class AttributeKind { Property, Relationship };

struct NamedAttribute;

struct Attribute {
  AttributeKind kind = AttributeKind::Property;
  Json value;                       // Property only
  std::optional<EntityId> object;   // Relationship only
  std::optional<std::string> observed_at;
  std::optional<std::string> unit_code;
  std::vector<NamedAttribute> sub_attributes;

  static Attribute property(Json value);
  static Attribute relationship(EntityId object);

  bool is_property() const noexcept { return kind == AttributeKind::Property; }
};

struct NamedAttribute {
  std::string name;
  Attribute attribute;
};

bool operator==(const Attribute& a, const Attribute& b);
bool operator==(const NamedAttribute& a, const NamedAttribute& b);

struct Entity {
  EntityId id;
  std::vector<std::string> types;
  std::vector<NamedAttribute> attributes;

  const Attribute* find(std::string_view name) const;

  friend bool operator==(const Entity&, const Entity&) = default;
};

/// True for ISO-8601 date-times that carry a timezone designator.
bool is_iso8601_with_zone(std::string_view text);

/// Attribute/entity keys that never name an attribute.
bool is_reserved_entity_key(std::string_view key);

Entity parse_entity(std::string_view document);
Entity entity_from_json(const Json& doc);
Attribute attribute_from_json(std::string_view name, const Json& doc);

/// Canonical document: id, type, then attributes in insertion order.
std::string serialize_entity(const Entity& e);
Json entity_to_json(const Entity& e);
/// Canonical attribute document: type, value|object, observedAt, unitCode, sub-attributes.
Json attribute_to_json(const Attribute& a);

/// Upsert: replaces an existing attribute in place or appends a new one.
Entity apply_update(Entity e, std::string_view name, Attribute a);

/// Batch files hold one canonical entity document per line.
std::vector<Entity> parse_batch(std::string_view text);
std::string serialize_batch(const std::vector<Entity>& entities);

/// Flat term map standing in for a JSON-LD @context.
class ContextMap {
public:
  /// Core NGSI-LD terms plus the default vocabulary prefix for unknown terms.
  ContextMap();
  explicit ContextMap(std::map<std::string, std::string> terms);

  static constexpr std::string_view kDefaultVocab =
      "https://uri.etsi.org/ngsi-ld/default-context/";

  void define(std::string term, std::string iri);
  std::string expand(std::string_view term) const;
  std::string compact(std::string_view iri) const;
  const std::map<std::string, std::string>& terms() const noexcept { return terms_; }

private:
  std::map<std::string, std::string> terms_;
  std::map<std::string, std::string> reverse_;
};

}  // namespace vforge::ngsild
