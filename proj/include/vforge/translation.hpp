#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vforge/document.hpp"
#include "vforge/ngsild.hpp"
#include "vforge/ontology.hpp"
#include "vforge/review.hpp"
#include "vforge/schema.hpp"

namespace vforge::pipeline {

enum class Transform { Identity, DatetimeNormalize, GeoPoint };

std::string_view transform_name(Transform t);
Transform parse_transform(std::string_view s);

struct AttributeRule {
  std::string source_key;
  std::string target_name;
  ngsild::AttributeKind kind = ngsild::AttributeKind::Property;
  Transform transform = Transform::Identity;
  std::string range;  // target range; the entity type for relationships
};

/// Nested source concept that becomes its own entity.
struct ChildLink {
  std::string source_key;
  std::string source_concept;
  bool array = false;
};

struct TranslationRule {
  std::string source_concept;
  std::vector<std::string> source_paths;  // schema paths, "$.sensor", "$.items[]"
  std::string entity_type;
  std::string id_template;                // "urn:ngsi-ld:{Type}:{field}" or ":{hash}"
  bool hash_fallback = false;
  std::vector<AttributeRule> attribute_rules;
  std::vector<ChildLink> children;
  std::vector<std::string> carry_over;

  const AttributeRule* rule_for(std::string_view source_key) const;
};

struct Provenance {
  std::string session_id;
  std::string source_ontology;
  std::string target_ontology;
  std::string label_model_hash;
  std::string classifier_hash;
  std::string created_at;
};

struct TranslationConfig {
  int version = 1;
  std::vector<TranslationRule> rules;
  Provenance provenance;

  const TranslationRule* rule_at(std::string_view schema_path) const;

  Json to_json() const;
  static TranslationConfig from_json(const Json& doc);
  /// Throws ConfigNotFound when the file is missing.
  static TranslationConfig load(const std::string& path);
};

inline constexpr double kPropertyMatchThreshold = 0.6;

struct CompileOptions {
  double property_threshold = kPropertyMatchThreshold;
  bool hash_fallback = false;
  Provenance provenance;
};

/// One rule per APPROVED pair. Errors: NoApprovedPairs, UnknownConcept.
TranslationConfig compile_config(const review::ReviewSession& session, const schema::SourceSchema& schema,
                                 const onto::Ontology& target, const CompileOptions& options = {});

/// Parent entities precede their children. Errors: MissingIdField.
std::vector<ngsild::Entity> translate(const TranslationConfig& config, const Json& sample);

/// ISO-8601 date or date-time to UTC with a 'Z' designator; fractional seconds kept.
/// Throws InvalidArgument on text that is not a date.
std::string normalize_datetime(std::string_view text);

/// {lat, lon} or {latitude, longitude} to a GeoJSON Point.
Json to_geo_point(const Json& value);

}  // namespace vforge::pipeline
