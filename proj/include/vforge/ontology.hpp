#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vforge/document.hpp"

namespace vforge::onto {

struct PropertyDef {
  std::string name;
  std::string range;
  // Alternative source-side spellings; used by attribute-level mapping.
  std::vector<std::string> synonyms;

  friend bool operator==(const PropertyDef&, const PropertyDef&) = default;
};

struct Concept {
  std::string name;
  std::optional<std::string> iri;
  std::optional<std::string> description;
  std::set<std::string> parents;
  std::vector<PropertyDef> properties;
  std::set<std::string> synonyms;

  const PropertyDef* property(std::string_view name) const;

  friend bool operator==(const Concept&, const Concept&) = default;
};

/// Named concept set with an acyclic parent relation. Concepts iterate in name order.
class Ontology {
public:
  Ontology() = default;
  explicit Ontology(std::string name) : name_(std::move(name)) {}

  /// Validates: DuplicateConcept, DuplicateProperty, DanglingParent, ParentCycle.
  static Ontology from_json(const Json& doc);
  static Ontology parse(std::string_view document);
  Json to_json() const;

  /// Throws DuplicateConcept / DuplicateProperty. Parent links are checked by validate().
  void add(Concept c);
  void validate() const;

  const std::string& name() const noexcept { return name_; }
  const std::map<std::string, Concept>& concepts() const noexcept { return concepts_; }
  const Concept* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  std::size_t size() const noexcept { return concepts_.size(); }

  /// Inverse of the parent relation, in name order.
  std::vector<std::string> children(std::string_view name) const;

  friend bool operator==(const Ontology&, const Ontology&) = default;

private:
  std::string name_;
  std::map<std::string, Concept> concepts_;
};

/// Splits identifiers on camelCase, acronym runs, letter/digit boundaries and
/// any non-alphanumeric separator; lowercases every token.
/// "GPSPosition2" -> {gps, position, 2}
std::vector<std::string> tokenize_name(std::string_view name);

std::string to_lower(std::string_view s);

/// Unit-cost Levenshtein distance.
std::size_t edit_distance(std::string_view a, std::string_view b);

/// 1 - lev(lower(a), lower(b)) / max(|a|, |b|).
double name_similarity(std::string_view a, std::string_view b);

/// |A ∩ B| / |A ∪ B|, and 0 when either set is empty.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

}  // namespace vforge::onto
