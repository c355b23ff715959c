#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vforge/knowledge.hpp"
#include "vforge/matching.hpp"
#include "vforge/ontology.hpp"

namespace vforge::synth {

/// mt19937_64 with distribution code spelled out, so streams are identical
/// across standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
  bool chance(double p) { return uniform() < p; }

private:
  std::mt19937_64 engine_;
};

struct SyntheticVotes {
  onto::LabelMatrix matrix;
  std::vector<int> truth;  // +1 / -1 per row
};

/// Draws y ~ Bernoulli(prior), then for each column: vote with probability
/// propensity[j], agreeing with y with probability accuracy[j].
SyntheticVotes generate_label_matrix(double prior, const std::vector<double>& accuracy,
                                     const std::vector<double>& propensity, std::size_t rows,
                                     std::uint64_t seed);

using Alignment = std::set<std::pair<std::string, std::string>>;

struct OntologyPair {
  onto::Ontology source;
  onto::Ontology target;
  Alignment truth;
  onto::DisjointnessList disjoint;  // a sample of pairs known not to correspond
};

/// Backbone of `concepts` (<= 30) target concepts and a source ontology derived
/// from it by name perturbation, synonym substitution and property dropout.
/// About a fifth of the source concepts also get one known non-match.
OntologyPair generate_ontology_pair(std::uint64_t seed, std::size_t concepts = 30);

struct Scorecard {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

Scorecard evaluate(const ki::MatchResult& result, const Alignment& truth);

}  // namespace vforge::synth
