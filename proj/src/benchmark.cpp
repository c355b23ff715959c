#include "vforge/benchmark.hpp"

namespace vforge::synth {

namespace {

Json scorecard_json(const Scorecard& s) {
  return {{"truePositives", s.true_positives}, {"falsePositives", s.false_positives},
          {"falseNegatives", s.false_negatives}, {"precision", s.precision},
          {"recall", s.recall}, {"f1", s.f1}};
}

}  // namespace

Json BenchmarkReport::to_json() const {
  return {{"seed", seed}, {"concepts", concepts}, {"classifier", scorecard_json(classifier)},
          {"generative", scorecard_json(generative)}};
}

BenchmarkReport run_matching_benchmark(std::uint64_t seed, std::size_t concepts, const ki::MatchOptions& options) {
  const auto pair = generate_ontology_pair(seed, concepts);
  ki::MatchOptions opts = options;
  if (opts.disjoint.size() == 0) opts.disjoint = pair.disjoint;
  const auto artifacts = ki::match_ontologies(pair.source, pair.target, opts);
  BenchmarkReport r;
  r.seed = seed;
  r.concepts = concepts;
  r.classifier = evaluate(artifacts.matches, pair.truth);
  r.generative = evaluate(ki::generative_matching(artifacts, options.threshold), pair.truth);
  return r;
}

}  // namespace vforge::synth
