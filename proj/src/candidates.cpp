#include "vforge/candidates.hpp"

#include <algorithm>

#include "vforge/error.hpp"

namespace vforge::onto {

Json FeatureVector::to_json() const {
  Json j = Json::object();
  for (std::size_t i = 0; i < kSize; ++i) j[std::string(kNames[i])] = values[i];
  return j;
}

FeatureVector FeatureVector::from_json(const Json& doc) {
  FeatureVector f;
  for (std::size_t i = 0; i < kSize; ++i) {
    auto key = std::string(kNames[i]);
    if (!doc.contains(key)) fail("MalformedDocument", "feature vector lacks " + key);
    f.values[i] = doc[key].get<double>();
  }
  return f;
}

namespace {

std::set<std::string> token_set(std::string_view text) {
  auto tokens = tokenize_name(text);
  return {tokens.begin(), tokens.end()};
}

// "date_observed", "dateObserved" and "DateObserved" all map to "dateobserved".
std::string property_key(std::string_view name) {
  std::string key;
  for (const auto& t : tokenize_name(name)) key += t;
  return key.empty() ? to_lower(name) : key;
}

}  // namespace

ConceptProfile make_profile(const Concept& c, const Ontology& ont) {
  ConceptProfile p;
  p.name = c.name;
  p.lower_name = to_lower(c.name);
  p.iri = c.iri;
  p.tokens = token_set(c.name);
  for (const auto& prop : c.properties) p.property_names.insert(property_key(prop.name));
  p.parents.assign(c.parents.begin(), c.parents.end());
  for (const auto& child : ont.children(c.name)) {
    for (auto& t : tokenize_name(child)) p.child_tokens.insert(std::move(t));
  }
  if (c.description && !c.description->empty()) {
    p.has_description = true;
    p.description_tokens = token_set(*c.description);
  }
  p.synonyms.insert(p.lower_name);
  for (const auto& s : c.synonyms) p.synonyms.insert(to_lower(s));
  return p;
}

OntologyIndex::OntologyIndex(const Ontology& ont) : ont_(&ont) {
  profiles_.reserve(ont.size());
  for (const auto& [_, c] : ont.concepts()) profiles_.push_back(make_profile(c, ont));
}

FeatureVector extract_features(const ConceptProfile& src, const ConceptProfile& tgt) {
  FeatureVector f;
  f[FeatureVector::ExactName] = src.lower_name == tgt.lower_name ? 1.0 : 0.0;
  f[FeatureVector::LevSim] = name_similarity(src.name, tgt.name);
  f[FeatureVector::TokenJaccard] = jaccard(src.tokens, tgt.tokens);
  f[FeatureVector::PropertyJaccard] = jaccard(src.property_names, tgt.property_names);
  double parent = 0.0;
  for (const auto& a : src.parents) {
    for (const auto& b : tgt.parents) parent = std::max(parent, name_similarity(a, b));
  }
  f[FeatureVector::ParentSim] = parent;
  f[FeatureVector::ChildOverlap] = jaccard(src.child_tokens, tgt.child_tokens);
  f[FeatureVector::DescOverlap] = (src.has_description && tgt.has_description)
                                      ? jaccard(src.description_tokens, tgt.description_tokens)
                                      : 0.0;
  return f;
}

FeatureVector extract_features(const Concept& src, const Concept& tgt, const Ontology& src_ont,
                               const Ontology& tgt_ont) {
  return extract_features(make_profile(src, src_ont), make_profile(tgt, tgt_ont));
}

std::string make_pair_id(std::string_view src, std::string_view tgt) {
  std::string id(src);
  id += "→";
  id += tgt;
  return id;
}

Json CandidateTable::to_json() const {
  Json rows_json = Json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"pairId", r.pair_id()},
                         {"src", r.src_name},
                         {"tgt", r.tgt_name},
                         {"features", r.features.to_json()}});
  }
  return rows_json;
}

CandidateTable build_candidate_table(const OntologyIndex& src, const OntologyIndex& tgt) {
  const auto& sp = src.profiles();
  const auto& tp = tgt.profiles();
  const long long n_src = static_cast<long long>(sp.size());
  const long long n_tgt = static_cast<long long>(tp.size());
  CandidateTable table;
  table.rows.resize(static_cast<std::size_t>(n_src * n_tgt));

  // Each row slot is written by exactly one iteration; order is fixed by index.
#pragma omp parallel for schedule(static)
  for (long long k = 0; k < n_src * n_tgt; ++k) {
    const auto i = static_cast<std::size_t>(k / n_tgt);
    const auto j = static_cast<std::size_t>(k % n_tgt);
    auto& row = table.rows[static_cast<std::size_t>(k)];
    row.src = i;
    row.tgt = j;
    row.src_name = sp[i].name;
    row.tgt_name = tp[j].name;
    row.features = extract_features(sp[i], tp[j]);
  }
  return table;
}

}  // namespace vforge::onto
