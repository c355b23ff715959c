#include <algorithm>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "vforge/error.hpp"
#include "vforge/fixtures.hpp"
#include "vforge/io.hpp"
#include "vforge/pipeline.hpp"
#include "vforge/review.hpp"

using namespace vforge;
using namespace vforge::review;

namespace {

std::string code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

ki::ScoreTable abc_scores() {
  return {{"A", "X", 0.9}, {"A", "Y", 0.6}, {"A", "Z", 0.05}, {"B", "X", 0.4},
          {"B", "Y", 0.7}, {"B", "Z", 0.2},  {"C", "X", 0.3},  {"C", "Z", 0.5}};
}

ReviewSession abc_session() {
  const auto scores = abc_scores();
  return ReviewSession::create(scores, ki::select_matching(scores), {});
}

Status status_of(const ReviewSession& s, std::string_view id) {
  const auto* c = s.find(id);
  REQUIRE(c);
  return c->status;
}

Json state_of(const ReviewSession& s) {
  Json out = Json::array();
  for (const auto& c : s.candidates()) out.push_back(c.to_json());
  return out;
}

void check_one_to_one(const ReviewSession& s) {
  std::set<std::string> src, tgt;
  for (const auto& c : s.approved()) {
    CHECK(src.insert(c.src).second);
    CHECK(tgt.insert(c.tgt).second);
  }
}

}  // namespace

TEST_CASE("session creation") {
  const auto s = abc_session();
  // A→Z sits below the floor
  CHECK(s.candidates().size() == 7);
  CHECK_FALSE(s.find("A→Z"));
  for (const auto& c : s.candidates()) CHECK(c.status == Status::Pending);
  std::set<std::string> rec;
  for (const auto& c : s.candidates()) {
    if (c.recommended) rec.insert(c.pair_id);
  }
  CHECK(rec == std::set<std::string>{"A→X", "B→Y", "C→Z"});
  CHECK(abc_session().id() == s.id());
  CHECK(ReviewSession::create(abc_scores(), {}, {}, 0.5).candidates().size() == 4);

  const Json summary = s.summary_json();
  CHECK(summary["counts"]["PENDING"] == 7);
  CHECK(summary["decisions"] == 0);
}

TEST_CASE("approval supersedes competitors") {
  auto s = abc_session();
  const auto d = s.decide({"A→X", Action::Approve});
  CHECK(status_of(s, "A→X") == Status::Approved);
  CHECK(status_of(s, "A→Y") == Status::Superseded);
  CHECK(status_of(s, "B→X") == Status::Superseded);
  CHECK(status_of(s, "C→X") == Status::Superseded);
  CHECK(status_of(s, "B→Y") == Status::Pending);
  CHECK(d.changes.size() == 4);
  CHECK(d.changes[0] == std::pair<std::string, Status>{"A→X", Status::Approved});
  CHECK(s.find("A→X")->decided_by == DecidedBy::Human);

  CHECK(code_of([&] { s.decide({"A→Y", Action::Approve}); }) == "InvalidTransition");
  CHECK(code_of([&] { s.decide({"A→X", Action::Approve}); }) == "InvalidTransition");
  CHECK(code_of([&] { s.decide({"Q→X", Action::Approve}); }) == "UnknownPair");
  CHECK(s.log().size() == 1);
}

TEST_CASE("reject and undo") {
  auto s = abc_session();
  s.decide({"C→Z", Action::Reject});
  CHECK(status_of(s, "C→Z") == Status::Rejected);
  CHECK(code_of([&] { s.decide({"C→Z", Action::Approve}); }) == "InvalidTransition");
  CHECK(code_of([&] { s.decide({"C→Z", Action::Reject}); }) == "InvalidTransition");

  s.decide({"A→X", Action::Approve});
  s.decide({"B→Y", Action::Approve});
  // Undoing A→X frees C→X; A→Y and B→X stay blocked by B→Y.
  const auto d = s.decide({"A→X", Action::Reject});
  CHECK(status_of(s, "A→X") == Status::Rejected);
  CHECK(status_of(s, "C→X") == Status::Pending);
  CHECK(status_of(s, "A→Y") == Status::Superseded);
  CHECK(status_of(s, "B→X") == Status::Superseded);
  CHECK(d.changes.size() == 2);
}

TEST_CASE("remap") {
  auto s = abc_session();
  // C→Y was never a candidate
  REQUIRE_FALSE(s.find("C→Y"));
  const auto d = s.decide({"C→Z", Action::Remap, "Y"});
  CHECK(status_of(s, "C→Y") == Status::Approved);
  CHECK(s.find("C→Y")->score == 0.0);
  CHECK(status_of(s, "C→Z") == Status::Superseded);
  CHECK(status_of(s, "B→Y") == Status::Superseded);
  CHECK(status_of(s, "A→Y") == Status::Superseded);
  CHECK(d.changes.front().first == "C→Y");

  CHECK(code_of([&] { s.decide({"A→X", Action::Remap, "Y"}); }) == "TargetConflict");
  CHECK(code_of([&] { s.decide({"A→X", Action::Remap, "Nowhere"}); }) == "UnknownConcept");
  CHECK(code_of([&] { s.decide({"A→X", Action::Remap, std::nullopt}); }) == "InvalidArgument");

  // remapping onto an existing sub-floor pair keeps its score
  auto t = abc_session();
  t.decide({"A→X", Action::Remap, "Z"});
  CHECK(t.find("A→Z")->score == 0.05);
}

TEST_CASE("auto approval follows the recommendations") {
  auto s = abc_session();
  s.auto_approve();
  std::set<std::string> approved;
  for (const auto& c : s.approved()) {
    approved.insert(c.pair_id);
    CHECK(c.decided_by == DecidedBy::Auto);
  }
  CHECK(approved == std::set<std::string>{"A→X", "B→Y", "C→Z"});
  CHECK(s.log().size() == 3);
  CHECK(s.log()[0].pair_id == "A→X");
}

TEST_CASE("decision documents") {
  const Decision d{"A→X", Action::Remap, "Z", DecidedBy::Auto};
  const auto back = Decision::from_json(d.to_json());
  CHECK(back.pair_id == "A→X");
  CHECK(back.action == Action::Remap);
  CHECK(back.target == "Z");
  CHECK(back.decided_by == DecidedBy::Auto);
  CHECK(parse_action("approve") == Action::Approve);
  CHECK(parse_status("SUPERSEDED") == Status::Superseded);
  CHECK(code_of([] { parse_action("maybe"); }) == "InvalidArgument");
}

TEST_CASE("random decision sequences keep the invariants and replay exactly") {
  std::mt19937_64 rng(21);
  const std::vector<std::string> targets = {"X", "Y", "Z"};
  for (int trial = 0; trial < 200; ++trial) {
    auto s = abc_session();
    std::map<std::string, Status> before;
    for (int step = 0; step < 8; ++step) {
      const auto& cands = s.candidates();
      const auto& pick = cands[rng() % cands.size()];
      Decision d;
      d.pair_id = pick.pair_id;
      d.action = static_cast<Action>(rng() % 3);
      if (d.action == Action::Remap) d.target = targets[rng() % targets.size()];
      const auto snapshot = state_of(s);
      const auto log_size = s.log().size();
      try {
        const auto delta = s.decide(d);
        // SUPERSEDED only appears through the delta of a decision
        for (const auto& c : s.candidates()) {
          if (c.status != Status::Superseded) continue;
          const bool was = std::any_of(snapshot.begin(), snapshot.end(), [&](const Json& j) {
            return j["pairId"] == c.pair_id && j["status"] == "SUPERSEDED";
          });
          const bool now = std::any_of(delta.changes.begin(), delta.changes.end(),
                                       [&](const auto& ch) { return ch.first == c.pair_id; });
          CHECK((was || now));
        }
      } catch (const Error&) {
        // a refused decision changes nothing
        CHECK(state_of(s) == snapshot);
        CHECK(s.log().size() == log_size);
      }
      check_one_to_one(s);
    }
    const auto reloaded = ReviewSession::from_json(parse_json(dump_compact(s.to_json())));
    CHECK(state_of(reloaded) == state_of(s));
    CHECK(reloaded.to_json() == s.to_json());
  }
}

TEST_CASE("annotations of the weather samples") {
  pipeline::PipelineOptions opts;
  opts.root_name = "weatherObserved";
  const auto samples = io::parse_json_lines(std::string(fixtures::weather_samples()));
  const auto r = pipeline::run_pipeline(samples, onto::Ontology::parse(fixtures::backbone_ontology()), opts);
  const auto ann = annotate_samples(samples, r.schema, r.match.scores);
  REQUIRE(ann.size() == 4);
  for (std::size_t i = 0; i < ann.size(); ++i) {
    CHECK(ann[i].sample_index == i);
    REQUIRE(ann[i].annotations.size() == 2);
    const auto& root = ann[i].annotations[0];
    CHECK(root.source_path == "$");
    CHECK(root.source_concept == "weatherObserved");
    REQUIRE_FALSE(root.candidates.empty());
    CHECK(root.candidates[0].target == "WeatherObserved");
    CHECK(root.candidates.size() <= kTopCandidates);
    for (std::size_t k = 1; k < root.candidates.size(); ++k) {
      CHECK(root.candidates[k - 1].score >= root.candidates[k].score);
    }
    CHECK(ann[i].annotations[1].source_path == "$.device");
    CHECK(ann[i].annotations[1].candidates[0].target == "Device");
    CHECK(root.values["station"] == samples[i]["station"]);
    CHECK_FALSE(root.values.contains("device"));
  }
  // samples 0 and 3 share a shape
  CHECK(annotations_to_json({ann[0]})[0]["annotations"][0]["candidates"] ==
        annotations_to_json({ann[3]})[0]["annotations"][0]["candidates"]);
  CHECK(annotations_to_json(annotations_from_json(annotations_to_json(ann))) == annotations_to_json(ann));

  // a concept scoring zero everywhere is still listed
  ki::ScoreTable zeros;
  for (const auto& c : r.schema.concepts) zeros.push_back({c.name, "WeatherObserved", 0.0});
  const auto empty = annotate_samples(samples, r.schema, zeros);
  CHECK(empty[0].annotations.size() == 2);
  CHECK(empty[0].annotations[0].candidates.empty());

  CHECK(code_of([&] { annotate_samples({parse_json(R"({"x":{"y":1}})")}, r.schema, r.match.scores); }) ==
        "UnknownConcept");
}
