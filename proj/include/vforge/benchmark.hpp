#pragma once

#include <cstdint>

#include "vforge/document.hpp"
#include "vforge/infusion.hpp"
#include "vforge/synthetic.hpp"

namespace vforge::synth {

struct BenchmarkReport {
  std::uint64_t seed = 0;
  std::size_t concepts = 0;
  Scorecard classifier;
  Scorecard generative;  // thresholded label-model posteriors

  Json to_json() const;
};

/// Generated ontology pair matched twice: classifier scores and generative posteriors.
BenchmarkReport run_matching_benchmark(std::uint64_t seed, std::size_t concepts = 30,
                                       const ki::MatchOptions& options = {});

}  // namespace vforge::synth
