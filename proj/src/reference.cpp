#include "vforge/reference.hpp"

#include "vforge/error.hpp"

namespace vforge::reference {

onto::CandidateTable build_candidate_table(const onto::OntologyIndex& src,
                                           const onto::OntologyIndex& tgt) {
  onto::CandidateTable table;
  table.rows.reserve(src.size() * tgt.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (std::size_t j = 0; j < tgt.size(); ++j) {
      const auto& s = src.profiles()[i];
      const auto& t = tgt.profiles()[j];
      table.rows.push_back({i, j, s.name, t.name, onto::extract_features(s, t)});
    }
  }
  return table;
}

onto::LabelMatrix apply_knowledge_functions(const onto::CandidateTable& table,
                                            const onto::OntologyIndex& src,
                                            const onto::OntologyIndex& tgt,
                                            const std::vector<onto::KnowledgeFunction>& kfs) {
  if (kfs.empty()) fail("InvalidArgument", "at least one knowledge function is required");
  std::vector<onto::ColumnMeta> cols;
  for (const auto& kf : kfs) cols.push_back({kf.id, kf.strength});
  onto::LabelMatrix m(table.size(), std::move(cols));
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& r = table.rows[i];
    onto::PairView view{src.profiles()[r.src], tgt.profiles()[r.tgt], r.features};
    for (std::size_t j = 0; j < kfs.size(); ++j) {
      m.set(i, j, static_cast<std::int8_t>(kfs[j].vote(view)));
    }
  }
  return m;
}

std::vector<double> posterior_batch(const ki::LabelModelParams& params,
                                    const onto::LabelMatrix& matrix) {
  std::vector<double> q;
  q.reserve(matrix.rows());
  for (std::size_t i = 0; i < matrix.rows(); ++i) q.push_back(ki::posterior(params, matrix.row(i)));
  return q;
}

std::vector<double> predict_batch(const ki::ClassifierModel& model,
                                  std::span<const onto::FeatureVector> xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(ki::predict(model, x));
  return out;
}

}  // namespace vforge::reference
