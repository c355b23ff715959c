#include "vforge/knowledge.hpp"

#include <algorithm>

#include "vforge/error.hpp"

namespace vforge::onto {

std::string_view strength_name(Strength s) { return s == Strength::Strong ? "strong" : "weak"; }

Json KfThresholds::to_json() const {
  return {{"nameSimMatch", name_sim_match},   {"nameSimNoMatch", name_sim_no_match},
          {"tokenMatch", token_match},        {"propsMatch", props_match},
          {"propsMinCount", props_min_count}, {"parentSim", parent_sim},
          {"parentLevSim", parent_lev_sim}};
}

KfThresholds KfThresholds::from_json(const Json& doc) {
  KfThresholds t;
  t.name_sim_match = doc.value("nameSimMatch", t.name_sim_match);
  t.name_sim_no_match = doc.value("nameSimNoMatch", t.name_sim_no_match);
  t.token_match = doc.value("tokenMatch", t.token_match);
  t.props_match = doc.value("propsMatch", t.props_match);
  t.props_min_count = doc.value("propsMinCount", t.props_min_count);
  t.parent_sim = doc.value("parentSim", t.parent_sim);
  t.parent_lev_sim = doc.value("parentLevSim", t.parent_lev_sim);
  return t;
}

DisjointnessList DisjointnessList::parse(std::string_view text) {
  DisjointnessList list;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0 || tab + 1 == line.size()) {
      fail("MalformedDocument", "disjointness line " + std::to_string(line_no) +
                                    " is not 'src<TAB>tgt'");
    }
    list.add(std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)));
  }
  return list;
}

bool DisjointnessList::contains(std::string_view src, std::string_view tgt) const {
  return pairs_.count(std::pair<std::string, std::string>(src, tgt)) > 0;
}

std::vector<KnowledgeFunction> bundled_knowledge_functions(const KfThresholds& t,
                                                           DisjointnessList disjoint) {
  using F = FeatureVector;
  std::vector<KnowledgeFunction> kfs;
  kfs.push_back({"KF-NAME-EXACT", Strength::Weak, [](const PairView& p) {
                   return p.features[F::ExactName] == 1.0 ? Label::Match : Label::Abstain;
                 }});
  kfs.push_back({"KF-NAME-SIM", Strength::Weak, [t](const PairView& p) {
                   double s = p.features[F::LevSim];
                   if (s >= t.name_sim_match) return Label::Match;
                   if (s <= t.name_sim_no_match) return Label::NoMatch;
                   return Label::Abstain;
                 }});
  kfs.push_back({"KF-SYNONYM", Strength::Weak, [](const PairView& p) {
                   for (const auto& s : p.src.synonyms) {
                     if (p.tgt.synonyms.count(s)) return Label::Match;
                   }
                   return Label::Abstain;
                 }});
  kfs.push_back({"KF-TOKEN", Strength::Weak, [t](const PairView& p) {
                   return p.features[F::TokenJaccard] >= t.token_match ? Label::Match
                                                                       : Label::Abstain;
                 }});
  kfs.push_back({"KF-PROPS", Strength::Weak, [t](const PairView& p) {
                   double j = p.features[F::PropertyJaccard];
                   if (j >= t.props_match) return Label::Match;
                   if (j == 0.0 && p.src.property_names.size() >= t.props_min_count &&
                       p.tgt.property_names.size() >= t.props_min_count) {
                     return Label::NoMatch;
                   }
                   return Label::Abstain;
                 }});
  kfs.push_back({"KF-PARENT", Strength::Weak, [t](const PairView& p) {
                   return (p.features[F::ParentSim] >= t.parent_sim &&
                           p.features[F::LevSim] >= t.parent_lev_sim)
                              ? Label::Match
                              : Label::Abstain;
                 }});
  kfs.push_back({"KF-IRI", Strength::Strong, [](const PairView& p) {
                   return (p.src.iri && p.tgt.iri && *p.src.iri == *p.tgt.iri) ? Label::Match
                                                                               : Label::Abstain;
                 }});
  kfs.push_back({"KF-DISJOINT", Strength::Strong,
                 [d = std::move(disjoint)](const PairView& p) {
                   return d.contains(p.src.name, p.tgt.name) ? Label::NoMatch : Label::Abstain;
                 }});
  return kfs;
}

LabelMatrix::LabelMatrix(std::size_t rows, std::vector<ColumnMeta> columns)
    : rows_(rows), columns_(std::move(columns)), data_(rows * columns_.size(), 0) {}

void LabelMatrix::set(std::size_t i, std::size_t j, std::int8_t v) {
  if (v < -1 || v > 1) fail("InvalidLabel", "label entries must be -1, 0 or +1");
  data_[i * cols() + j] = v;
}

double LabelMatrix::non_abstain_rate(std::size_t j) const {
  if (rows_ == 0) return 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < rows_; ++i) count += at(i, j) != 0;
  return static_cast<double>(count) / static_cast<double>(rows_);
}

std::size_t LabelMatrix::non_abstain_total() const {
  return static_cast<std::size_t>(
      std::count_if(data_.begin(), data_.end(), [](std::int8_t v) { return v != 0; }));
}

Json LabelMatrix::to_json() const {
  Json cols_json = Json::array();
  for (const auto& c : columns_) {
    cols_json.push_back({{"id", c.id}, {"strength", strength_name(c.strength)}});
  }
  Json rows_json = Json::array();
  for (std::size_t i = 0; i < rows_; ++i) {
    Json r = Json::array();
    for (auto v : row(i)) r.push_back(static_cast<int>(v));
    rows_json.push_back(std::move(r));
  }
  return {{"columns", std::move(cols_json)}, {"rows", std::move(rows_json)}};
}

LabelMatrix LabelMatrix::from_json(const Json& doc) {
  std::vector<ColumnMeta> cols;
  for (const auto& c : doc.at("columns")) {
    cols.push_back({c.at("id").get<std::string>(),
                    c.value("strength", "weak") == "strong" ? Strength::Strong : Strength::Weak});
  }
  const auto& rows_json = doc.at("rows");
  LabelMatrix m(rows_json.size(), std::move(cols));
  for (std::size_t i = 0; i < rows_json.size(); ++i) {
    if (rows_json[i].size() != m.cols()) fail("MalformedDocument", "ragged label matrix row");
    for (std::size_t j = 0; j < m.cols(); ++j) {
      m.set(i, j, static_cast<std::int8_t>(rows_json[i][j].get<int>()));
    }
  }
  return m;
}

LabelMatrix apply_knowledge_functions(const CandidateTable& table, const OntologyIndex& src,
                                      const OntologyIndex& tgt,
                                      const std::vector<KnowledgeFunction>& kfs) {
  if (kfs.empty()) fail("InvalidArgument", "at least one knowledge function is required");
  std::vector<ColumnMeta> cols;
  for (const auto& kf : kfs) cols.push_back({kf.id, kf.strength});
  LabelMatrix m(table.size(), std::move(cols));
  const auto n = static_cast<long long>(table.size());

#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    const auto& r = table.rows[static_cast<std::size_t>(i)];
    PairView view{src.profiles()[r.src], tgt.profiles()[r.tgt], r.features};
    for (std::size_t j = 0; j < kfs.size(); ++j) {
      m.set(static_cast<std::size_t>(i), j, static_cast<std::int8_t>(kfs[j].vote(view)));
    }
  }
  return m;
}

}  // namespace vforge::onto
