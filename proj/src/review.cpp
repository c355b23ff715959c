#include "vforge/review.hpp"

#include <algorithm>

#include "vforge/error.hpp"

namespace vforge::review {

namespace {

using schema::TypeKind;

std::map<std::string, std::vector<CandidateScore>> top_candidates(const ki::ScoreTable& scores) {
  std::map<std::string, std::vector<CandidateScore>> by_source;
  for (const auto& s : scores) {
    if (s.score > 0.0) by_source[s.src].push_back({s.tgt, s.score});
  }
  for (auto& [_, list] : by_source) {
    std::sort(list.begin(), list.end(), [](const CandidateScore& a, const CandidateScore& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.target < b.target;
    });
    if (list.size() > kTopCandidates) list.resize(kTopCandidates);
  }
  return by_source;
}

struct Annotator {
  const schema::SourceSchema& schema;
  const std::map<std::string, std::vector<CandidateScore>>& top;
  std::vector<Annotation>& out;

  void visit(const Json& object, const std::string& schema_path, const std::string& instance_path) {
    const auto* concept_ptr = schema.concept_at(schema_path);
    if (!concept_ptr) {
      fail("UnknownConcept", "no source concept at " + schema_path);
    }
    Annotation a;
    a.source_path = instance_path;
    a.source_concept = concept_ptr->name;
    if (auto it = top.find(concept_ptr->name); it != top.end()) a.candidates = it->second;
    a.values = Json::object();
    const std::size_t slot = out.size();
    out.push_back(std::move(a));

    for (const auto& [key, value] : object.items()) {
      const auto* prop = concept_ptr->find(key);
      const TypeKind kind = prop ? prop->type.kind : TypeKind::Unknown;
      if (!prop) {
        const bool geo = schema.geo_detection && schema::looks_like_geo(value);
        const bool nested = (value.is_object() && !geo) ||
                            (value.is_array() && std::any_of(value.begin(), value.end(),
                                                             [](const Json& x) { return x.is_object(); }));
        if (nested) fail("UnknownConcept", "no source concept at " + schema_path + "." + key);
      }
      if (value.is_object() && kind == TypeKind::Object) {
        visit(value, schema_path + "." + key, instance_path + "." + key);
      } else if (value.is_array() && kind == TypeKind::Array && prop->type.items &&
                 prop->type.items->kind == TypeKind::Object) {
        for (std::size_t i = 0; i < value.size(); ++i) {
          if (!value[i].is_object()) continue;
          visit(value[i], schema_path + "." + key + "[]",
                instance_path + "." + key + "[" + std::to_string(i) + "]");
        }
      } else {
        out[slot].values[key] = value;
      }
    }
  }
};

}  // namespace

std::vector<AnnotatedSample> annotate_samples(const std::vector<Json>& samples,
                                              const schema::SourceSchema& schema,
                                              const ki::ScoreTable& scores) {
  const auto top = top_candidates(scores);
  std::vector<AnnotatedSample> result;
  result.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].is_object()) fail("NonObjectSample", "sample " + std::to_string(i) + " is not an object");
    AnnotatedSample s;
    s.sample_index = i;
    Annotator{schema, top, s.annotations}.visit(samples[i], "$", "$");
    result.push_back(std::move(s));
  }
  return result;
}

Json annotations_to_json(const std::vector<AnnotatedSample>& samples) {
  Json out = Json::array();
  for (const auto& s : samples) {
    Json anns = Json::array();
    for (const auto& a : s.annotations) {
      Json cands = Json::array();
      for (const auto& c : a.candidates) cands.push_back({{"target", c.target}, {"score", c.score}});
      anns.push_back({{"sourcePath", a.source_path},
                      {"sourceConcept", a.source_concept},
                      {"candidates", std::move(cands)},
                      {"values", a.values}});
    }
    out.push_back({{"sampleIndex", s.sample_index}, {"annotations", std::move(anns)}});
  }
  return out;
}

std::vector<AnnotatedSample> annotations_from_json(const Json& doc) {
  std::vector<AnnotatedSample> out;
  for (const auto& sj : doc) {
    AnnotatedSample s;
    s.sample_index = sj.at("sampleIndex").get<std::size_t>();
    for (const auto& aj : sj.at("annotations")) {
      Annotation a;
      a.source_path = aj.at("sourcePath").get<std::string>();
      a.source_concept = aj.at("sourceConcept").get<std::string>();
      for (const auto& c : aj.at("candidates")) {
        a.candidates.push_back({c.at("target").get<std::string>(), c.at("score").get<double>()});
      }
      a.values = aj.value("values", Json::object());
      s.annotations.push_back(std::move(a));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string_view status_name(Status s) {
  switch (s) {
    case Status::Pending: return "PENDING";
    case Status::Approved: return "APPROVED";
    case Status::Rejected: return "REJECTED";
    case Status::Superseded: return "SUPERSEDED";
  }
  return "";
}

Status parse_status(std::string_view s) {
  for (auto st : {Status::Pending, Status::Approved, Status::Rejected, Status::Superseded}) {
    if (status_name(st) == s) return st;
  }
  fail("InvalidArgument", "unknown status '" + std::string(s) + "'");
}

std::string_view action_name(Action a) {
  switch (a) {
    case Action::Approve: return "approve";
    case Action::Reject: return "reject";
    case Action::Remap: return "remap";
  }
  return "";
}

Action parse_action(std::string_view s) {
  for (auto a : {Action::Approve, Action::Reject, Action::Remap}) {
    if (action_name(a) == s) return a;
  }
  fail("InvalidArgument", "unknown action '" + std::string(s) + "'");
}

std::string_view decided_by_name(DecidedBy d) { return d == DecidedBy::Auto ? "auto" : "human"; }

Json Candidate::to_json() const {
  Json j = {{"pairId", pair_id}, {"src", src},           {"tgt", tgt},
            {"score", score},    {"status", status_name(status)}};
  j["decidedBy"] = decided_by ? Json(decided_by_name(*decided_by)) : Json(nullptr);
  j["recommended"] = recommended;
  return j;
}

Json Decision::to_json() const {
  Json j = {{"pairId", pair_id}, {"action", action_name(action)}};
  if (target) j["target"] = *target;
  j["decidedBy"] = decided_by_name(decided_by);
  return j;
}

Decision Decision::from_json(const Json& doc) {
  Decision d;
  d.pair_id = doc.at("pairId").get<std::string>();
  d.action = parse_action(doc.at("action").get<std::string>());
  if (doc.contains("target") && !doc["target"].is_null()) d.target = doc["target"].get<std::string>();
  d.decided_by = doc.value("decidedBy", "human") == "auto" ? DecidedBy::Auto : DecidedBy::Human;
  return d;
}

Json StateDelta::to_json() const {
  Json out = Json::array();
  for (const auto& [id, st] : changes) out.push_back({{"pairId", id}, {"status", status_name(st)}});
  return out;
}

ReviewSession ReviewSession::create(const ki::ScoreTable& scores, const ki::MatchResult& matches,
                                    std::vector<AnnotatedSample> annotations, double floor) {
  ReviewSession s;
  s.floor_ = floor;
  std::set<std::string> recommended;
  for (const auto& m : matches.matches) recommended.insert(m.pair_id());
  for (const auto& sp : scores) {
    s.all_scores_[sp.pair_id()] = sp.score;
    s.targets_.insert(sp.tgt);
    if (sp.score < floor) continue;
    Candidate c;
    c.pair_id = sp.pair_id();
    c.src = sp.src;
    c.tgt = sp.tgt;
    c.score = sp.score;
    c.recommended = recommended.count(c.pair_id) > 0;
    s.initial_.push_back(std::move(c));
  }
  s.candidates_ = s.initial_;
  s.annotations_ = std::move(annotations);

  // Content-derived id: the same inputs always open the same session.
  Json basis = Json::array();
  for (const auto& sp : scores) basis.push_back({sp.pair_id(), sp.score});
  s.id_ = "s-" + hex64(fnv1a64(dump_compact(basis) + "|" + std::to_string(floor))).substr(0, 12);
  return s;
}

const Candidate* ReviewSession::find(std::string_view pair_id) const {
  for (const auto& c : candidates_) {
    if (c.pair_id == pair_id) return &c;
  }
  return nullptr;
}

Candidate* ReviewSession::find_mut(std::string_view pair_id) {
  return const_cast<Candidate*>(std::as_const(*this).find(pair_id));
}

std::vector<Candidate> ReviewSession::with_status(std::optional<Status> status) const {
  std::vector<Candidate> out;
  for (const auto& c : candidates_) {
    if (!status || c.status == *status) out.push_back(c);
  }
  return out;
}

void ReviewSession::supersede_competitors(const Candidate& approved, StateDelta& delta) {
  auto& list = superseded_by_[approved.pair_id];
  for (auto& c : candidates_) {
    if (c.pair_id == approved.pair_id || c.status != Status::Pending) continue;
    if (c.src == approved.src || c.tgt == approved.tgt) {
      c.status = Status::Superseded;
      list.push_back(c.pair_id);
      delta.changes.emplace_back(c.pair_id, c.status);
    }
  }
}

void ReviewSession::check_one_to_one() const {
  std::set<std::string> srcs;
  std::set<std::string> tgts;
  for (const auto& c : candidates_) {
    if (c.status != Status::Approved) continue;
    if (!srcs.insert(c.src).second || !tgts.insert(c.tgt).second) {
      fail("InternalError", "approved pairs are no longer one-to-one");
    }
  }
}

StateDelta ReviewSession::decide(const Decision& d) {
  Candidate* c = find_mut(d.pair_id);
  if (!c) fail("UnknownPair", "no candidate " + d.pair_id);
  StateDelta delta;

  switch (d.action) {
    case Action::Approve: {
      if (c->status != Status::Pending) {
        fail("InvalidTransition", "cannot approve " + d.pair_id + " in state " +
                                      std::string(status_name(c->status)));
      }
      c->status = Status::Approved;
      c->decided_by = d.decided_by;
      delta.changes.emplace_back(c->pair_id, c->status);
      supersede_competitors(*c, delta);
      break;
    }
    case Action::Reject: {
      if (c->status == Status::Pending) {
        c->status = Status::Rejected;
        c->decided_by = d.decided_by;
        delta.changes.emplace_back(c->pair_id, c->status);
      } else if (c->status == Status::Approved) {
        // Undo: the pairs this approval superseded compete again unless another
        // approval still blocks them.
        c->status = Status::Rejected;
        c->decided_by = d.decided_by;
        delta.changes.emplace_back(c->pair_id, c->status);
        auto released = std::move(superseded_by_[c->pair_id]);
        superseded_by_.erase(c->pair_id);
        for (const auto& id : released) {
          Candidate* other = find_mut(id);
          if (!other || other->status != Status::Superseded) continue;
          const bool blocked = std::any_of(candidates_.begin(), candidates_.end(), [&](const Candidate& a) {
            return a.status == Status::Approved && (a.src == other->src || a.tgt == other->tgt);
          });
          if (blocked) continue;
          other->status = Status::Pending;
          delta.changes.emplace_back(other->pair_id, other->status);
        }
      } else {
        fail("InvalidTransition", "cannot reject " + d.pair_id + " in state " +
                                      std::string(status_name(c->status)));
      }
      break;
    }
    case Action::Remap: {
      if (!d.target) fail("InvalidArgument", "remap needs a target concept");
      if (c->status != Status::Pending) {
        fail("InvalidTransition", "cannot remap " + d.pair_id + " in state " +
                                      std::string(status_name(c->status)));
      }
      if (!targets_.count(*d.target)) fail("UnknownConcept", "no target concept " + *d.target);
      for (const auto& other : candidates_) {
        if (other.status == Status::Approved && other.tgt == *d.target) {
          fail("TargetConflict", *d.target + " is already approved for " + other.src);
        }
      }
      const std::string src = c->src;
      const std::string new_id = onto::make_pair_id(src, *d.target);
      Candidate* n = find_mut(new_id);
      if (!n) {
        Candidate fresh;
        fresh.pair_id = new_id;
        fresh.src = src;
        fresh.tgt = *d.target;
        auto it = all_scores_.find(new_id);
        fresh.score = it == all_scores_.end() ? 0.0 : it->second;
        candidates_.push_back(std::move(fresh));
        n = &candidates_.back();
      }
      n->status = Status::Approved;
      n->decided_by = d.decided_by;
      delta.changes.emplace_back(n->pair_id, n->status);
      supersede_competitors(*n, delta);
      break;
    }
  }
  log_.push_back(d);
  check_one_to_one();
  return delta;
}

void ReviewSession::auto_approve() {
  std::vector<const Candidate*> recs;
  for (const auto& c : candidates_) {
    if (c.recommended && c.status == Status::Pending) recs.push_back(&c);
  }
  std::sort(recs.begin(), recs.end(), [](const Candidate* a, const Candidate* b) {
    if (a->score != b->score) return a->score > b->score;
    return a->pair_id < b->pair_id;
  });
  std::vector<std::string> ids;
  for (const auto* c : recs) ids.push_back(c->pair_id);
  for (const auto& id : ids) {
    const Candidate* c = find(id);
    if (c && c->status == Status::Pending) decide({id, Action::Approve, std::nullopt, DecidedBy::Auto});
  }
}

Json ReviewSession::to_json() const {
  Json initial = Json::array();
  for (const auto& c : initial_) initial.push_back({{"src", c.src}, {"tgt", c.tgt}, {"score", c.score}, {"recommended", c.recommended}});
  Json scores = Json::array();
  for (const auto& [id, score] : all_scores_) scores.push_back({{"pairId", id}, {"score", score}});
  Json log = Json::array();
  for (const auto& d : log_) log.push_back(d.to_json());
  Json state = Json::array();
  for (const auto& c : candidates_) state.push_back(c.to_json());
  return {{"sessionId", id_},
          {"floor", floor_},
          {"targets", targets_},
          {"scores", std::move(scores)},
          {"initial", std::move(initial)},
          {"annotations", annotations_to_json(annotations_)},
          {"log", std::move(log)},
          {"state", std::move(state)}};
}

ReviewSession ReviewSession::from_json(const Json& doc) {
  ReviewSession s;
  s.id_ = doc.at("sessionId").get<std::string>();
  s.floor_ = doc.value("floor", kDefaultScoreFloor);
  for (const auto& t : doc.at("targets")) s.targets_.insert(t.get<std::string>());
  for (const auto& sj : doc.at("scores")) s.all_scores_[sj.at("pairId").get<std::string>()] = sj.at("score").get<double>();
  for (const auto& cj : doc.at("initial")) {
    Candidate c;
    c.src = cj.at("src").get<std::string>();
    c.tgt = cj.at("tgt").get<std::string>();
    c.pair_id = onto::make_pair_id(c.src, c.tgt);
    c.score = cj.at("score").get<double>();
    c.recommended = cj.value("recommended", false);
    s.initial_.push_back(std::move(c));
  }
  s.candidates_ = s.initial_;
  s.annotations_ = annotations_from_json(doc.value("annotations", Json::array()));
  // State is never trusted from the file: replaying the log rebuilds it.
  for (const auto& dj : doc.at("log")) s.decide(Decision::from_json(dj));
  return s;
}

Json ReviewSession::summary_json() const {
  std::map<std::string, std::size_t> counts;
  for (auto st : {Status::Pending, Status::Approved, Status::Rejected, Status::Superseded}) {
    counts[std::string(status_name(st))] = 0;
  }
  for (const auto& c : candidates_) ++counts[std::string(status_name(c.status))];
  Json j = {{"sessionId", id_}, {"candidates", candidates_.size()}, {"decisions", log_.size()}};
  j["counts"] = counts;
  return j;
}

}  // namespace vforge::review
