#pragma once

// Single-threaded twins of the OpenMP kernels. Tests assert the parallel
// versions reproduce these bit-for-bit; the benchmark times both.

#include <span>
#include <vector>

#include "vforge/candidates.hpp"
#include "vforge/classifier.hpp"
#include "vforge/knowledge.hpp"
#include "vforge/label_model.hpp"

namespace vforge::reference {

onto::CandidateTable build_candidate_table(const onto::OntologyIndex& src,
                                           const onto::OntologyIndex& tgt);

onto::LabelMatrix apply_knowledge_functions(const onto::CandidateTable& table,
                                            const onto::OntologyIndex& src,
                                            const onto::OntologyIndex& tgt,
                                            const std::vector<onto::KnowledgeFunction>& kfs);

std::vector<double> posterior_batch(const ki::LabelModelParams& params,
                                    const onto::LabelMatrix& matrix);

std::vector<double> predict_batch(const ki::ClassifierModel& model,
                                  std::span<const onto::FeatureVector> xs);

}  // namespace vforge::reference
