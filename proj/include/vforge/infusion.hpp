#pragma once

#include <vector>

#include "vforge/candidates.hpp"
#include "vforge/classifier.hpp"
#include "vforge/knowledge.hpp"
#include "vforge/label_model.hpp"
#include "vforge/matching.hpp"
#include "vforge/ontology.hpp"

namespace vforge::ki {

struct MatchOptions {
  onto::KfThresholds thresholds;
  onto::DisjointnessList disjoint;
  EmOptions em;
  ClassifierHyper hyper;
  double threshold = 0.5;
};

/// Everything produced while matching a source ontology against a target one.
struct MatchArtifacts {
  onto::CandidateTable table;
  onto::LabelMatrix votes;
  LabelModelParams label_model;
  std::vector<double> posteriors;
  ClassifierModel classifier;
  ScoreTable model_scores;  // classifier output before strong overrides
  std::vector<StrongVote> strong_votes;
  ScoreTable scores;        // after strong overrides
  MatchResult matches;
};

/// Candidate table -> knowledge-function votes -> EM label model -> soft
/// labels -> logistic classifier -> strong overrides -> greedy 1:1 matching.
MatchArtifacts match_ontologies(const onto::Ontology& source, const onto::Ontology& target,
                                const MatchOptions& options = {});

/// Same pipeline but scoring pairs with the generative posteriors directly.
MatchResult generative_matching(const MatchArtifacts& artifacts, double threshold = 0.5);

}  // namespace vforge::ki
