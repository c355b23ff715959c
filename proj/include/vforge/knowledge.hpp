#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vforge/candidates.hpp"
#include "vforge/document.hpp"

namespace vforge::onto {

enum class Label : std::int8_t { NoMatch = -1, Abstain = 0, Match = 1 };
enum class Strength { Weak, Strong };

std::string_view strength_name(Strength s);

struct PairView {
  const ConceptProfile& src;
  const ConceptProfile& tgt;
  const FeatureVector& features;
};

/// Expert rule voting on a candidate pair. `vote` must be pure.
struct KnowledgeFunction {
  std::string id;
  Strength strength = Strength::Weak;
  std::function<Label(const PairView&)> vote;
};

/// Calibration of the bundled suite; every threshold is overridable from config.
struct KfThresholds {
  double name_sim_match = 0.85;
  double name_sim_no_match = 0.25;
  double token_match = 0.5;
  double props_match = 0.4;
  std::size_t props_min_count = 3;
  double parent_sim = 0.85;
  double parent_lev_sim = 0.5;

  Json to_json() const;
  static KfThresholds from_json(const Json& doc);
};

/// Pairs (source concept, target concept) known not to correspond.
class DisjointnessList {
public:
  /// Lines `srcName<TAB>tgtName`; blank lines and lines starting with '#' ignored.
  static DisjointnessList parse(std::string_view text);

  void add(std::string src, std::string tgt) { pairs_.emplace(std::move(src), std::move(tgt)); }
  bool contains(std::string_view src, std::string_view tgt) const;
  std::size_t size() const noexcept { return pairs_.size(); }

private:
  std::set<std::pair<std::string, std::string>, std::less<>> pairs_;
};

/// KF-NAME-EXACT, KF-NAME-SIM, KF-SYNONYM, KF-TOKEN, KF-PROPS, KF-PARENT (weak);
/// KF-IRI, KF-DISJOINT (strong).
std::vector<KnowledgeFunction> bundled_knowledge_functions(const KfThresholds& t = {},
                                                           DisjointnessList disjoint = {});

struct ColumnMeta {
  std::string id;
  Strength strength = Strength::Weak;

  friend bool operator==(const ColumnMeta&, const ColumnMeta&) = default;
};

/// Votes of m knowledge functions on n candidate pairs, row-major, entries in {-1,0,+1}.
class LabelMatrix {
public:
  LabelMatrix() = default;
  LabelMatrix(std::size_t rows, std::vector<ColumnMeta> columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return columns_.size(); }
  const std::vector<ColumnMeta>& columns() const noexcept { return columns_; }

  std::int8_t at(std::size_t i, std::size_t j) const { return data_[i * cols() + j]; }
  void set(std::size_t i, std::size_t j, std::int8_t v);
  std::span<const std::int8_t> row(std::size_t i) const {
    return {data_.data() + i * cols(), cols()};
  }

  double non_abstain_rate(std::size_t j) const;
  std::size_t non_abstain_total() const;

  Json to_json() const;
  static LabelMatrix from_json(const Json& doc);

  friend bool operator==(const LabelMatrix&, const LabelMatrix&) = default;

private:
  std::size_t rows_ = 0;
  std::vector<ColumnMeta> columns_;
  std::vector<std::int8_t> data_;

};

/// OpenMP kernel over rows.
LabelMatrix apply_knowledge_functions(const CandidateTable& table, const OntologyIndex& src,
                                      const OntologyIndex& tgt,
                                      const std::vector<KnowledgeFunction>& kfs);

}  // namespace vforge::onto
