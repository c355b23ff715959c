#include "vforge/pipeline.hpp"

#include <chrono>
#include <cstdio>

#include "vforge/io.hpp"

namespace vforge::pipeline {

std::string format_epoch(std::int64_t seconds) {
  using namespace std::chrono;
  const sys_seconds t{std::chrono::seconds{seconds}};
  const auto dp = floor<days>(t);
  const year_month_day d{dp};
  const hh_mm_ss hms{t - dp};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

Provenance make_provenance(const ki::MatchArtifacts& match, std::optional<std::int64_t> epoch) {
  Provenance p;
  p.label_model_hash = hex64(fnv1a64(dump_compact(match.label_model.to_json())));
  p.classifier_hash = hex64(fnv1a64(dump_compact(match.classifier.to_json())));
  const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  p.created_at = format_epoch(epoch.value_or(now));
  return p;
}

void write_match_artifacts(const std::filesystem::path& dir, const onto::Ontology& source,
                           const onto::Ontology& target, const ki::MatchArtifacts& match) {
  io::write_file(dir / artifact::kSourceOntology, dump_pretty(source.to_json()));
  io::write_file(dir / artifact::kTargetOntology, dump_pretty(target.to_json()));
  io::write_file(dir / artifact::kCandidates, dump_pretty(match.table.to_json()));
  io::write_file(dir / artifact::kLabelMatrix, dump_pretty(match.votes.to_json()));
  io::write_file(dir / artifact::kLabelModel, dump_pretty(match.label_model.to_json()));
  io::write_file(dir / artifact::kClassifier, dump_pretty(match.classifier.to_json()));
  io::write_file(dir / artifact::kScores, dump_pretty(ki::scores_to_json(match.scores)));
  io::write_file(dir / artifact::kMatches, dump_pretty(match.matches.to_json()));
}

PipelineResult run_pipeline(const std::vector<Json>& samples, const onto::Ontology& target,
                            const PipelineOptions& options) {
  auto schema = schema::infer_from_samples(samples, options.root_name, {options.detect_geo});
  auto source = schema::schema_to_ontology(schema);
  auto match = ki::match_ontologies(source, target, options.match);
  auto annotations = review::annotate_samples(samples, schema, match.scores);
  auto session = review::ReviewSession::create(match.scores, match.matches, annotations, options.score_floor);
  if (options.auto_approve) session.auto_approve();

  PipelineResult result{std::move(schema), std::move(source), std::move(match),
                        std::move(annotations), std::move(session), std::nullopt};

  if (options.auto_approve) {
    CompileOptions copts;
    copts.provenance = make_provenance(result.match, options.epoch);
    result.config = compile_config(result.session, result.schema, target, copts);
  }

  if (options.out_dir) {
    const auto& dir = *options.out_dir;
    io::write_file(dir / artifact::kSchema, dump_pretty(result.schema.to_json()));
    write_match_artifacts(dir, result.source, target, result.match);
    io::write_file(dir / artifact::kAnnotations, dump_pretty(review::annotations_to_json(result.annotations)));
    io::write_file(dir / artifact::kSession, dump_pretty(result.session.to_json()));
    if (result.config) io::write_file(dir / artifact::kConfig, dump_pretty(result.config->to_json()));
  }
  return result;
}

}  // namespace vforge::pipeline
