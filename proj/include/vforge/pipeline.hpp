#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vforge/infusion.hpp"
#include "vforge/review.hpp"
#include "vforge/schema.hpp"
#include "vforge/translation.hpp"

namespace vforge::pipeline {

struct PipelineOptions {
  std::string root_name = "root";
  bool auto_approve = false;
  bool detect_geo = true;
  std::uint64_t seed = 42;             // recorded only; training is deterministic
  std::optional<std::int64_t> epoch;   // provenance timestamp override (seconds)
  std::optional<std::filesystem::path> out_dir;
  ki::MatchOptions match;
  double score_floor = review::kDefaultScoreFloor;
};

struct PipelineResult {
  schema::SourceSchema schema;
  onto::Ontology source;
  ki::MatchArtifacts match;
  std::vector<review::AnnotatedSample> annotations;
  review::ReviewSession session;
  std::optional<TranslationConfig> config;  // empty when review is pending

  bool pending_review() const { return !config.has_value(); }
};

/// Steps 0-4: schema inference, matching, annotation, review (auto-approve
/// when enabled) and compilation. Artifacts go to options.out_dir when set.
PipelineResult run_pipeline(const std::vector<Json>& samples, const onto::Ontology& target,
                            const PipelineOptions& options);

/// "1970-01-01T00:00:00Z" style UTC timestamp.
std::string format_epoch(std::int64_t seconds);

/// Model hashes from the match artifacts; createdAt from `epoch`, or now.
Provenance make_provenance(const ki::MatchArtifacts& match, std::optional<std::int64_t> epoch);

/// Writes the source/target ontologies and every matching artifact into `dir`.
void write_match_artifacts(const std::filesystem::path& dir, const onto::Ontology& source,
                           const onto::Ontology& target, const ki::MatchArtifacts& match);

/// Artifact file names inside a pipeline output directory.
namespace artifact {
inline constexpr const char* kSchema = "schema.json";
inline constexpr const char* kSourceOntology = "source_ontology.json";
inline constexpr const char* kCandidates = "candidates.json";
inline constexpr const char* kLabelMatrix = "labels.json";
inline constexpr const char* kLabelModel = "labelmodel.json";
inline constexpr const char* kClassifier = "classifier.json";
inline constexpr const char* kScores = "scores.json";
inline constexpr const char* kMatches = "matches.json";
inline constexpr const char* kAnnotations = "annotations.json";
inline constexpr const char* kSession = "session.json";
inline constexpr const char* kConfig = "config.json";
inline constexpr const char* kTargetOntology = "target_ontology.json";
}  // namespace artifact

}  // namespace vforge::pipeline
