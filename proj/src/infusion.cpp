#include "vforge/infusion.hpp"

namespace vforge::ki {

MatchArtifacts match_ontologies(const onto::Ontology& source, const onto::Ontology& target,
                                const MatchOptions& options) {
  MatchArtifacts a;
  onto::OntologyIndex src_index(source);
  onto::OntologyIndex tgt_index(target);
  a.table = onto::build_candidate_table(src_index, tgt_index);

  auto kfs = onto::bundled_knowledge_functions(options.thresholds, options.disjoint);
  a.votes = onto::apply_knowledge_functions(a.table, src_index, tgt_index, kfs);
  a.label_model = fit_label_model(a.votes, options.em);
  a.posteriors = posterior_batch(a.label_model, a.votes);

  std::vector<onto::FeatureVector> features;
  features.reserve(a.table.size());
  for (const auto& r : a.table.rows) features.push_back(r.features);
  a.classifier = train_classifier(features, a.posteriors, options.hyper);
  const auto predicted = predict_batch(a.classifier, features);

  a.model_scores.reserve(a.table.size());
  for (std::size_t i = 0; i < a.table.size(); ++i) {
    a.model_scores.push_back({a.table.rows[i].src_name, a.table.rows[i].tgt_name, predicted[i]});
  }
  a.strong_votes = collect_strong_votes(a.table, a.votes);
  a.scores = apply_strong_overrides(a.model_scores, a.strong_votes);
  a.matches = select_matching(a.scores, options.threshold);
  return a;
}

MatchResult generative_matching(const MatchArtifacts& a, double threshold) {
  ScoreTable gen;
  gen.reserve(a.table.size());
  for (std::size_t i = 0; i < a.table.size(); ++i) {
    gen.push_back({a.table.rows[i].src_name, a.table.rows[i].tgt_name, a.posteriors[i]});
  }
  return select_matching(apply_strong_overrides(std::move(gen), a.strong_votes), threshold);
}

}  // namespace vforge::ki
