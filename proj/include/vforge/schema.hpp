#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vforge/document.hpp"
#include "vforge/ontology.hpp"

namespace vforge::schema {

enum class TypeKind { Unknown, Null, Boolean, Integer, Number, Datetime, Text, Geo, Array, Object };

/// Element of the type lattice used for inferred source properties.
///
/// Unknown is the bottom (element type of an empty array), Text the top.
/// Null joins with a base type by marking it optional.
struct InferredType {
  TypeKind kind = TypeKind::Unknown;
  bool optional = false;
  std::shared_ptr<const InferredType> items;  // Array
  std::string concept_ref;                    // Object

  static InferredType of(TypeKind kind, bool optional = false);
  static InferredType array(InferredType items, bool optional = false);
  static InferredType object(std::string concept_ref, bool optional = false);

  /// Compact display form, e.g. "number?", "array<object<sensor>>".
  std::string str() const;
  Json to_json() const;
  static InferredType from_json(const Json& doc);

  friend bool operator==(const InferredType& a, const InferredType& b);
};

/// Least upper bound in the lattice; total, falls back to text.
InferredType unify_types(const InferredType& a, const InferredType& b);

/// Classifies a scalar document value (objects/arrays are handled by inference).
InferredType scalar_type_of(const Json& value);

/// ISO-8601 date or date-time (timezone optional).
bool looks_like_datetime(std::string_view text);

/// Exactly {lat, lon} or {latitude, longitude}, both numeric.
bool looks_like_geo(const Json& value);

struct SourceProperty {
  std::string key;
  InferredType type;
  std::size_t presence = 0;
  std::vector<Json> samples;  // at most kMaxSamples, first observed
};

struct SourceConcept {
  std::string name;
  std::optional<std::string> parent;
  std::size_t instances = 0;
  std::vector<std::string> paths;          // e.g. "$", "$.sensor", "$.readings[]"
  std::vector<SourceProperty> properties;  // key order

  const SourceProperty* find(std::string_view key) const;
};

struct SourceSchema {
  std::string root;
  bool geo_detection = true;
  std::vector<SourceConcept> concepts;  // breadth-first from the root

  const SourceConcept* find(std::string_view name) const;
  /// Concept bound to a root-relative path such as "$.sensor".
  const SourceConcept* concept_at(std::string_view path) const;

  Json to_json() const;
  static SourceSchema from_json(const Json& doc);
};

inline constexpr std::size_t kMaxSamples = 5;

struct InferOptions {
  bool detect_geo = true;
};

SourceSchema infer_from_samples(const std::vector<Json>& samples, std::string_view root_name,
                                InferOptions options = {});

/// Ontology range name for a property type ("Number", "DateTime", concept name, ...).
std::string range_of(const InferredType& t);

onto::Ontology schema_to_ontology(const SourceSchema& s);

}  // namespace vforge::schema
