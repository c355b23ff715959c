#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vforge/document.hpp"
#include "vforge/matching.hpp"
#include "vforge/schema.hpp"

namespace vforge::review {

struct CandidateScore {
  std::string target;
  double score = 0.0;
};

struct Annotation {
  std::string source_path;  // instance path, e.g. "$", "$.sensor", "$.readings[1]"
  std::string source_concept;
  std::vector<CandidateScore> candidates;  // top 3 with score > 0, score desc
  Json values;                             // scalar key/values of the annotated object
};

struct AnnotatedSample {
  std::size_t sample_index = 0;
  std::vector<Annotation> annotations;
};

inline constexpr std::size_t kTopCandidates = 3;

/// Walks each sample alongside the schema. UnknownConcept if a sample object
/// sits at a path the schema does not know.
std::vector<AnnotatedSample> annotate_samples(const std::vector<Json>& samples,
                                              const schema::SourceSchema& schema,
                                              const ki::ScoreTable& scores);

Json annotations_to_json(const std::vector<AnnotatedSample>& samples);
std::vector<AnnotatedSample> annotations_from_json(const Json& doc);

enum class Status { Pending, Approved, Rejected, Superseded };
enum class DecidedBy { Auto, Human };
enum class Action { Approve, Reject, Remap };

std::string_view status_name(Status s);
Status parse_status(std::string_view s);
std::string_view action_name(Action a);
Action parse_action(std::string_view s);
std::string_view decided_by_name(DecidedBy d);

struct Candidate {
  std::string pair_id;
  std::string src;
  std::string tgt;
  double score = 0.0;
  Status status = Status::Pending;
  std::optional<DecidedBy> decided_by;
  bool recommended = false;

  Json to_json() const;
};

struct Decision {
  std::string pair_id;
  Action action = Action::Approve;
  std::optional<std::string> target;
  DecidedBy decided_by = DecidedBy::Human;

  Json to_json() const;
  static Decision from_json(const Json& doc);
};

/// Pairs whose status changed because of one decision.
struct StateDelta {
  std::vector<std::pair<std::string, Status>> changes;
  Json to_json() const;
};

inline constexpr double kDefaultScoreFloor = 0.1;

class ReviewSession {
public:
  /// Pairs scoring >= floor enter PENDING; pairs chosen by the matcher are flagged recommended.
  static ReviewSession create(const ki::ScoreTable& scores, const ki::MatchResult& matches,
                              std::vector<AnnotatedSample> annotations,
                              double floor = kDefaultScoreFloor);

  const std::string& id() const noexcept { return id_; }
  double floor() const noexcept { return floor_; }
  const std::vector<Candidate>& candidates() const noexcept { return candidates_; }
  const std::vector<Decision>& log() const noexcept { return log_; }
  const std::vector<AnnotatedSample>& annotations() const noexcept { return annotations_; }

  const Candidate* find(std::string_view pair_id) const;
  std::vector<Candidate> with_status(std::optional<Status> status) const;
  std::vector<Candidate> approved() const { return with_status(Status::Approved); }

  /// Errors: UnknownPair, InvalidTransition, TargetConflict, UnknownConcept.
  StateDelta decide(const Decision& d);

  /// Approves every recommended PENDING pair, in score order, as decidedBy=auto.
  void auto_approve();

  /// Initial candidate set plus the decision log; state is rebuilt by replay.
  Json to_json() const;
  static ReviewSession from_json(const Json& doc);

  Json summary_json() const;

private:
  Candidate* find_mut(std::string_view pair_id);
  void supersede_competitors(const Candidate& approved, StateDelta& delta);
  void check_one_to_one() const;

  std::string id_;
  double floor_ = kDefaultScoreFloor;
  std::vector<Candidate> initial_;
  std::vector<Candidate> candidates_;
  std::map<std::string, double> all_scores_;  // every scored pair, including sub-floor
  std::set<std::string> targets_;
  std::vector<AnnotatedSample> annotations_;
  std::vector<Decision> log_;
  std::map<std::string, std::vector<std::string>> superseded_by_;  // approved -> superseded
};

}  // namespace vforge::review
