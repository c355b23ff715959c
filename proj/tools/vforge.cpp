#include <csignal>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "httplib.h"
#include "vforge/bus.hpp"
#include "vforge/demo.hpp"
#include "vforge/error.hpp"
#include "vforge/http_api.hpp"
#include "vforge/io.hpp"
#include "vforge/mqtt_bridge.hpp"
#include "vforge/pipeline.hpp"
#include "vforge/platform.hpp"
#include "vforge/platform_api.hpp"
#include "vforge/review_api.hpp"

namespace fs = std::filesystem;
using namespace vforge;

namespace {

Json read_json(const fs::path& p) { return parse_json(io::read_file(p)); }

void write_json(const fs::path& p, const Json& doc) { io::write_file(p, dump_pretty(doc)); }

/// Blocks SIGINT/SIGTERM so that only wait_for_signal() sees them.
void block_signals(sigset_t& set) {
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
}

/// Binds, prints the bound address, serves until SIGINT/SIGTERM.
void serve(httplib::Server& server, const std::string& listen) {
  const auto addr = http::parse_listen(listen);
  sigset_t set;
  block_signals(set);
  int port = addr.port;
  if (port == 0) {
    port = server.bind_to_any_port(addr.host);
  } else if (!server.bind_to_port(addr.host, port)) {
    port = -1;
  }
  if (port < 0) fail("BindFailed", "cannot listen on " + listen);
  std::cout << "listening on http://" << addr.host << ":" << port << std::endl;
  std::thread worker([&server] { server.listen_after_bind(); });
  int sig = 0;
  sigwait(&set, &sig);
  server.stop();
  worker.join();
}

pipeline::Provenance provenance_from_dir(const fs::path& dir, std::optional<std::int64_t> epoch) {
  pipeline::Provenance p;
  p.label_model_hash = hex64(fnv1a64(dump_compact(read_json(dir / pipeline::artifact::kLabelModel))));
  p.classifier_hash = hex64(fnv1a64(dump_compact(read_json(dir / pipeline::artifact::kClassifier))));
  const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  p.created_at = pipeline::format_epoch(epoch.value_or(now));
  return p;
}

review::ReviewSession load_session(const fs::path& dir) {
  if (fs::exists(dir / pipeline::artifact::kSession)) {
    return review::ReviewSession::from_json(read_json(dir / pipeline::artifact::kSession));
  }
  std::vector<review::AnnotatedSample> annotations;
  if (fs::exists(dir / pipeline::artifact::kAnnotations)) {
    annotations = review::annotations_from_json(read_json(dir / pipeline::artifact::kAnnotations));
  }
  return review::ReviewSession::create(ki::scores_from_json(read_json(dir / pipeline::artifact::kScores)),
                                       ki::MatchResult::from_json(read_json(dir / pipeline::artifact::kMatches)),
                                       std::move(annotations));
}

struct Args {
  std::string in, out, root = "root", schema, target, scores, config, dir, serve, listen = "127.0.0.1:8080";
  std::string decide, action, remap_target;
  bool no_geo = false, auto_approve = false, hash_fallback = false;
  double threshold = 0.5, property_threshold = pipeline::kPropertyMatchThreshold;
  std::optional<std::int64_t> epoch;
  std::uint64_t seed = 42;
};

int cmd_extract_schema(const Args& a) {
  auto samples = io::read_json_lines(a.in);
  auto s = schema::infer_from_samples(samples, a.root, {!a.no_geo});
  write_json(a.out, s.to_json());
  return 0;
}

int cmd_match(const Args& a) {
  const auto s = schema::SourceSchema::from_json(read_json(a.schema));
  const auto source = schema::schema_to_ontology(s);
  const auto target = onto::Ontology::parse(io::read_file(a.target));
  ki::MatchOptions opts;
  opts.threshold = a.threshold;
  const auto m = ki::match_ontologies(source, target, opts);
  pipeline::write_match_artifacts(a.out, source, target, m);
  write_json(fs::path(a.out) / pipeline::artifact::kSchema, s.to_json());
  std::cout << dump_compact(m.matches.to_json()) << "\n";
  return 0;
}

int cmd_annotate(const Args& a) {
  const auto samples = io::read_json_lines(a.in);
  const auto s = schema::SourceSchema::from_json(read_json(a.schema));
  const auto scores = ki::scores_from_json(read_json(a.scores));
  write_json(a.out, review::annotations_to_json(review::annotate_samples(samples, s, scores)));
  return 0;
}

int cmd_review(const Args& a) {
  const fs::path dir = a.dir;
  auto session = load_session(dir);
  if (a.auto_approve) session.auto_approve();
  if (!a.decide.empty()) {
    review::Decision d;
    d.pair_id = a.decide;
    d.action = review::parse_action(a.action);
    if (!a.remap_target.empty()) d.target = a.remap_target;
    std::cout << dump_compact(session.decide(d).to_json()) << "\n";
  }
  write_json(dir / pipeline::artifact::kSession, session.to_json());
  if (a.serve.empty()) {
    std::cout << dump_pretty(session.summary_json()) << "\n";
    return 0;
  }
  review::ReviewService service;
  review::ReviewService::Context ctx;
  ctx.schema = schema::SourceSchema::from_json(read_json(dir / pipeline::artifact::kSchema));
  ctx.target = onto::Ontology::from_json(read_json(dir / pipeline::artifact::kTargetOntology));
  ctx.provenance = provenance_from_dir(dir, a.epoch);
  ctx.persist_dir = dir;
  service.add(std::move(session), std::move(ctx));
  httplib::Server server;
  service.mount(server);
  serve(server, a.serve);
  return 0;
}

int cmd_compile(const Args& a) {
  const fs::path dir = a.dir;
  const auto session = load_session(dir);
  const auto s = schema::SourceSchema::from_json(read_json(dir / pipeline::artifact::kSchema));
  const auto target = onto::Ontology::from_json(read_json(dir / pipeline::artifact::kTargetOntology));
  pipeline::CompileOptions opts;
  opts.property_threshold = a.property_threshold;
  opts.hash_fallback = a.hash_fallback;
  opts.provenance = provenance_from_dir(dir, a.epoch);
  const auto config = pipeline::compile_config(session, s, target, opts);
  write_json(a.out.empty() ? dir / pipeline::artifact::kConfig : fs::path(a.out), config.to_json());
  return 0;
}

int cmd_translate(const Args& a) {
  const auto config = pipeline::TranslationConfig::load(a.config);
  std::string out;
  for (const auto& sample : io::read_json_lines(a.in)) {
    for (const auto& e : pipeline::translate(config, sample)) out += dump_compact(ngsild::entity_to_json(e)) + "\n";
  }
  if (a.out.empty()) {
    std::cout << out;
  } else {
    io::write_file(a.out, out);
  }
  return 0;
}

int cmd_platform(const Args& a) {
  bus::Bus bus;
  auto bridge = bus::mqtt::Bridge::from_env(bus);
  platform::MasterController mc(bus);
  httplib::Server server;
  platform::mount_platform_api(server, mc);
  serve(server, a.listen);
  mc.stop();
  bridge.reset();
  bus.close();
  return 0;
}

int cmd_demo(const Args& a) {
  demo::DemoOptions opts;
  opts.out = a.out;
  opts.epoch = a.epoch;
  opts.seed = a.seed;
  const Json summary = demo::run_demo(opts);
  std::cout << dump_pretty(summary) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vforge: NGSI-LD virtualization and knowledge-infused extraction"};
  app.require_subcommand(1);
  Args a;
  int (*run)(const Args&) = nullptr;

  auto* ex = app.add_subcommand("extract-schema", "Infer a source schema from sample documents");
  ex->add_option("--in", a.in, "Samples file, one document per line")->required();
  ex->add_option("--root", a.root, "Root concept name");
  ex->add_flag("--no-geo", a.no_geo, "Disable geo-point detection");
  ex->add_option("--out", a.out, "Schema file to write")->required();
  ex->callback([&] { run = cmd_extract_schema; });

  auto* ma = app.add_subcommand("match", "Match a source schema against a target ontology");
  ma->add_option("--schema", a.schema, "Schema file")->required();
  ma->add_option("--target", a.target, "Target ontology file")->required();
  ma->add_option("--threshold", a.threshold, "Match threshold");
  ma->add_option("--out", a.out, "Artifact directory")->required();
  ma->callback([&] { run = cmd_match; });

  auto* an = app.add_subcommand("annotate", "Annotate samples with top candidate concepts");
  an->add_option("--in", a.in, "Samples file")->required();
  an->add_option("--schema", a.schema, "Schema file")->required();
  an->add_option("--scores", a.scores, "Scores file")->required();
  an->add_option("--out", a.out, "Annotations file")->required();
  an->callback([&] { run = cmd_annotate; });

  auto* rv = app.add_subcommand("review", "Inspect, decide or serve a review session");
  rv->add_option("--dir", a.dir, "Artifact directory (session.json is kept there)")->required();
  rv->add_flag("--auto-approve", a.auto_approve, "Approve every recommended pair");
  auto* decide = rv->add_option("--decide", a.decide, "Pair id to decide on");
  rv->add_option("--action", a.action, "approve, reject or remap")->needs(decide);
  rv->add_option("--target", a.remap_target, "Remap target concept")->needs(decide);
  rv->add_option("--serve", a.serve, "Serve the review API on host:port");
  rv->add_option("--epoch", a.epoch, "Provenance timestamp (seconds)");
  rv->callback([&] { run = cmd_review; });

  auto* co = app.add_subcommand("compile", "Compile approved pairs into a translation config");
  co->add_option("--dir", a.dir, "Artifact directory")->required();
  co->add_option("--out", a.out, "Config file (default <dir>/config.json)");
  co->add_option("--property-threshold", a.property_threshold, "Property name similarity threshold");
  co->add_flag("--hash-fallback", a.hash_fallback, "Use a content hash when no id field exists");
  co->add_option("--epoch", a.epoch, "Provenance timestamp (seconds)");
  co->callback([&] { run = cmd_compile; });

  auto* tr = app.add_subcommand("translate", "Translate source documents into NGSI-LD entities");
  tr->add_option("--config", a.config, "Translation config")->required();
  tr->add_option("--in", a.in, "Samples file")->required();
  tr->add_option("--out", a.out, "Entities file (default stdout)");
  tr->callback([&] { run = cmd_translate; });

  auto* pl = app.add_subcommand("platform", "Run the virtualization platform control plane");
  pl->add_option("--listen", a.listen, "host:port (port 0 picks a free port)");
  pl->callback([&] { run = cmd_platform; });

  auto* de = app.add_subcommand("demo", "Run the bundled end-to-end scenario");
  de->add_option("--out", a.out, "Output directory")->required();
  de->add_option("--epoch", a.epoch, "Provenance timestamp (seconds)");
  de->add_option("--seed", a.seed, "Synthetic benchmark seed");
  de->callback([&] { run = cmd_demo; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    return run(a);
  } catch (const Error& e) {
    std::cerr << "ERROR " << e.code() << ": " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "ERROR MalformedDocument: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "ERROR Internal: " << e.what() << "\n";
    return 1;
  }
}
