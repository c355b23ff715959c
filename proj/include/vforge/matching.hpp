#pragma once

#include <string>
#include <vector>

#include "vforge/candidates.hpp"
#include "vforge/document.hpp"
#include "vforge/knowledge.hpp"

namespace vforge::ki {

struct ScoredPair {
  std::string src;
  std::string tgt;
  double score = 0.0;

  std::string pair_id() const { return onto::make_pair_id(src, tgt); }
  friend bool operator==(const ScoredPair&, const ScoredPair&) = default;
};

/// Scores keyed by pair, kept in candidate-table order.
using ScoreTable = std::vector<ScoredPair>;

Json scores_to_json(const ScoreTable& scores);
ScoreTable scores_from_json(const Json& doc);

struct StrongVote {
  std::string pair_id;
  std::string function_id;
  onto::Label label = onto::Label::Abstain;
};

/// Non-abstaining votes of the strong columns of `votes`.
std::vector<StrongVote> collect_strong_votes(const onto::CandidateTable& table,
                                             const onto::LabelMatrix& votes);

/// MATCH pins a score to 1.0, NO_MATCH to 0.0. A pair with both raises
/// ConflictingStrongVotes naming the pair.
ScoreTable apply_strong_overrides(ScoreTable scores, const std::vector<StrongVote>& strong);

struct Match {
  std::string src;
  std::string tgt;
  double score = 0.0;

  std::string pair_id() const { return onto::make_pair_id(src, tgt); }
  friend bool operator==(const Match&, const Match&) = default;
};

struct MatchResult {
  std::vector<Match> matches;
  double threshold = 0.5;
  std::vector<std::string> unmatched_source;
  std::vector<std::string> unmatched_target;

  Json to_json() const;
  static MatchResult from_json(const Json& doc);
};

/// Greedy 1:1 selection: sort by (score desc, src asc, tgt asc) and accept a
/// pair iff score >= threshold and neither side is taken yet.
MatchResult select_matching(const ScoreTable& scores, double threshold = 0.5);

}  // namespace vforge::ki
