#include "vforge/matching.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "vforge/error.hpp"

namespace vforge::ki {

Json scores_to_json(const ScoreTable& scores) {
  Json out = Json::array();
  for (const auto& s : scores) {
    out.push_back({{"pairId", s.pair_id()}, {"src", s.src}, {"tgt", s.tgt}, {"score", s.score}});
  }
  return out;
}

ScoreTable scores_from_json(const Json& doc) {
  ScoreTable out;
  for (const auto& s : doc) {
    out.push_back({s.at("src").get<std::string>(), s.at("tgt").get<std::string>(),
                   s.at("score").get<double>()});
  }
  return out;
}

std::vector<StrongVote> collect_strong_votes(const onto::CandidateTable& table,
                                             const onto::LabelMatrix& votes) {
  std::vector<StrongVote> out;
  for (std::size_t j = 0; j < votes.cols(); ++j) {
    if (votes.columns()[j].strength != onto::Strength::Strong) continue;
    for (std::size_t i = 0; i < votes.rows(); ++i) {
      auto v = votes.at(i, j);
      if (v == 0) continue;
      out.push_back({table.rows[i].pair_id(), votes.columns()[j].id,
                     static_cast<onto::Label>(v)});
    }
  }
  return out;
}

ScoreTable apply_strong_overrides(ScoreTable scores, const std::vector<StrongVote>& strong) {
  std::map<std::string, onto::Label> verdict;
  for (const auto& v : strong) {
    if (v.label == onto::Label::Abstain) continue;
    auto [it, inserted] = verdict.emplace(v.pair_id, v.label);
    if (!inserted && it->second != v.label) {
      fail("ConflictingStrongVotes", "strong knowledge functions disagree on " + v.pair_id);
    }
  }
  for (auto& s : scores) {
    auto it = verdict.find(s.pair_id());
    if (it == verdict.end()) continue;
    s.score = it->second == onto::Label::Match ? 1.0 : 0.0;
  }
  return scores;
}

Json MatchResult::to_json() const {
  Json m = Json::array();
  for (const auto& x : matches) {
    m.push_back({{"pairId", x.pair_id()}, {"src", x.src}, {"tgt", x.tgt}, {"score", x.score}});
  }
  return {{"threshold", threshold},
          {"matches", std::move(m)},
          {"unmatchedSource", unmatched_source},
          {"unmatchedTarget", unmatched_target}};
}

MatchResult MatchResult::from_json(const Json& doc) {
  MatchResult r;
  r.threshold = doc.value("threshold", 0.5);
  for (const auto& x : doc.at("matches")) {
    r.matches.push_back({x.at("src").get<std::string>(), x.at("tgt").get<std::string>(),
                         x.at("score").get<double>()});
  }
  r.unmatched_source = doc.value("unmatchedSource", std::vector<std::string>{});
  r.unmatched_target = doc.value("unmatchedTarget", std::vector<std::string>{});
  return r;
}

MatchResult select_matching(const ScoreTable& scores, double threshold) {
  std::vector<const ScoredPair*> order;
  order.reserve(scores.size());
  std::set<std::string> all_src, all_tgt;
  for (const auto& s : scores) {
    order.push_back(&s);
    all_src.insert(s.src);
    all_tgt.insert(s.tgt);
  }
  std::sort(order.begin(), order.end(), [](const ScoredPair* a, const ScoredPair* b) {
    if (a->score != b->score) return a->score > b->score;
    if (a->src != b->src) return a->src < b->src;
    return a->tgt < b->tgt;
  });

  MatchResult r;
  r.threshold = threshold;
  std::set<std::string> used_src, used_tgt;
  for (const auto* s : order) {
    if (s->score < threshold) break;
    if (used_src.count(s->src) || used_tgt.count(s->tgt)) continue;
    used_src.insert(s->src);
    used_tgt.insert(s->tgt);
    r.matches.push_back({s->src, s->tgt, s->score});
  }
  for (const auto& s : all_src) {
    if (!used_src.count(s)) r.unmatched_source.push_back(s);
  }
  for (const auto& t : all_tgt) {
    if (!used_tgt.count(t)) r.unmatched_target.push_back(t);
  }
  return r;
}

}  // namespace vforge::ki
