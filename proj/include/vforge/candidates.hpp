#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vforge/document.hpp"
#include "vforge/ontology.hpp"

namespace vforge::onto {

/// Seven pairwise similarity features, all in [0,1], in this fixed order.
struct FeatureVector {
  static constexpr std::size_t kSize = 7;
  static constexpr std::array<std::string_view, kSize> kNames = {
      "exactName", "levSim", "tokenJaccard", "propertyJaccard",
      "parentSim", "childOverlap", "descOverlap"};
  enum Index : std::size_t {
    ExactName, LevSim, TokenJaccard, PropertyJaccard, ParentSim, ChildOverlap, DescOverlap
  };

  std::array<double, kSize> values{};

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }

  Json to_json() const;
  static FeatureVector from_json(const Json& doc);

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Everything feature extraction and knowledge functions need about one
/// concept, precomputed once per ontology.
struct ConceptProfile {
  std::string name;
  std::string lower_name;
  std::optional<std::string> iri;
  std::set<std::string> tokens;
  std::set<std::string> property_names;  // lowercased
  std::vector<std::string> parents;
  std::set<std::string> child_tokens;
  std::set<std::string> description_tokens;
  bool has_description = false;
  std::set<std::string> synonyms;  // lowercased, includes the concept's own name
};

ConceptProfile make_profile(const Concept& c, const Ontology& ont);

class OntologyIndex {
public:
  explicit OntologyIndex(const Ontology& ont);

  const Ontology& ontology() const noexcept { return *ont_; }
  const std::vector<ConceptProfile>& profiles() const noexcept { return profiles_; }
  std::size_t size() const noexcept { return profiles_.size(); }

private:
  const Ontology* ont_;
  std::vector<ConceptProfile> profiles_;  // concept name order
};

FeatureVector extract_features(const ConceptProfile& src, const ConceptProfile& tgt);
FeatureVector extract_features(const Concept& src, const Concept& tgt, const Ontology& src_ont,
                               const Ontology& tgt_ont);

/// `{src}→{tgt}`
std::string make_pair_id(std::string_view src, std::string_view tgt);

struct CandidateRow {
  std::size_t src = 0;  // index into the source OntologyIndex
  std::size_t tgt = 0;
  std::string src_name;
  std::string tgt_name;
  FeatureVector features;

  std::string pair_id() const { return make_pair_id(src_name, tgt_name); }
};

/// Cross product of source and target concepts, rows ordered by (src, tgt) name.
struct CandidateTable {
  std::vector<CandidateRow> rows;

  std::size_t size() const noexcept { return rows.size(); }
  Json to_json() const;
};

/// OpenMP kernel; see reference::build_candidate_table for the serial twin.
CandidateTable build_candidate_table(const OntologyIndex& src, const OntologyIndex& tgt);

}  // namespace vforge::onto
