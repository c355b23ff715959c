#include "vforge/review_api.hpp"

#include "vforge/http_api.hpp"
#include "vforge/io.hpp"
#include "vforge/pipeline.hpp"

namespace vforge::review {

namespace {

Json candidates_json(const std::vector<Candidate>& cs) {
  Json out = Json::array();
  for (const auto& c : cs) out.push_back(c.to_json());
  return out;
}

ReviewSession session_from_body(const Json& body) {
  if (body.contains("session")) return ReviewSession::from_json(body.at("session"));
  if (!body.contains("scores") || !body.contains("matches")) {
    fail("MissingField", "body needs 'session' or 'scores' and 'matches'");
  }
  std::vector<AnnotatedSample> annotations;
  if (body.contains("annotations")) annotations = annotations_from_json(body.at("annotations"));
  return ReviewSession::create(ki::scores_from_json(body.at("scores")),
                               ki::MatchResult::from_json(body.at("matches")), std::move(annotations),
                               body.value("floor", kDefaultScoreFloor));
}

}  // namespace

std::string ReviewService::add(ReviewSession session, Context context) {
  std::lock_guard lock(mu_);
  std::string id = session.id();
  sessions_.insert_or_assign(id, Entry{std::move(session), std::move(context)});
  return id;
}

ReviewSession ReviewService::session(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) fail("UnknownSession", "no session '" + id + "'");
  return it->second.session;
}

ReviewService::Entry& ReviewService::entry(const std::string& id) {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) fail("UnknownSession", "no session '" + id + "'");
  return it->second;
}

void ReviewService::persist(const Entry& e) const {
  if (!e.context.persist_dir) return;
  io::write_file(*e.context.persist_dir / pipeline::artifact::kSession, dump_pretty(e.session.to_json()));
}

void ReviewService::mount(httplib::Server& server) {
  using httplib::Request;
  using httplib::Response;
  using http::guarded;
  using http::send_json;

  server.Post("/api/sessions", [this](const Request& req, Response& res) {
    guarded(res, [&] {
      const Json body = http::body_json(req);
      Context ctx;
      if (body.contains("schema")) ctx.schema = schema::SourceSchema::from_json(body.at("schema"));
      if (body.contains("targetOntology")) ctx.target = onto::Ontology::from_json(body.at("targetOntology"));
      auto s = session_from_body(body);
      Json summary = s.summary_json();
      add(std::move(s), std::move(ctx));
      send_json(res, summary, 201);
    });
  });
  server.Get("/api/sessions", [this](const Request&, Response& res) {
    guarded(res, [&] {
      std::lock_guard lock(mu_);
      Json out = Json::array();
      for (const auto& [id, e] : sessions_) out.push_back(e.session.summary_json());
      send_json(res, out);
    });
  });
  server.Get(R"(/api/sessions/([^/]+))", [this](const Request& req, Response& res) {
    guarded(res, [&] {
      std::lock_guard lock(mu_);
      send_json(res, entry(req.matches[1]).session.summary_json());
    });
  });
  server.Get(R"(/api/sessions/([^/]+)/candidates)", [this](const Request& req, Response& res) {
    guarded(res, [&] {
      std::optional<Status> status;
      if (req.has_param("status")) status = parse_status(req.get_param_value("status"));
      std::lock_guard lock(mu_);
      send_json(res, candidates_json(entry(req.matches[1]).session.with_status(status)));
    });
  });
  server.Get(R"(/api/sessions/([^/]+)/annotations/([^/]+))", [this](const Request& req, Response& res) {
    guarded(res, [&] {
      std::lock_guard lock(mu_);
      const Entry& e = entry(req.matches[1]);
      const std::string concept_name = req.matches[2];
      if (e.context.schema && !e.context.schema->find(concept_name)) {
        fail("UnknownConcept", "no source concept '" + concept_name + "'");
      }
      Json out = Json::array();
      for (const auto& sample : e.session.annotations()) {
        for (const auto& a : sample.annotations) {
          if (a.source_concept != concept_name) continue;
          Json item = {{"sampleIndex", sample.sample_index}, {"sourcePath", a.source_path}, {"values", a.values}};
          Json cands = Json::array();
          for (const auto& c : a.candidates) cands.push_back({{"target", c.target}, {"score", c.score}});
          item["candidates"] = std::move(cands);
          out.push_back(std::move(item));
        }
      }
      send_json(res, out);
    });
  });
  server.Post(R"(/api/sessions/([^/]+)/candidates/([^/]+)/decision)", [this](const Request& req, Response& res) {
    guarded(res, [&] {
      Json body = http::body_json(req);
      body["pairId"] = std::string(req.matches[2]);
      if (!body.contains("decidedBy")) body["decidedBy"] = "human";
      const Decision d = Decision::from_json(body);
      std::lock_guard lock(mu_);
      Entry& e = entry(req.matches[1]);
      const StateDelta delta = e.session.decide(d);
      persist(e);
      send_json(res, {{"delta", delta.to_json()}, {"summary", e.session.summary_json()}});
    });
  });
  server.Post(R"(/api/sessions/([^/]+)/compile)", [this](const Request& req, Response& res) {
    guarded(res, [&] {
      const Json body = req.body.empty() ? Json::object() : http::body_json(req);
      std::lock_guard lock(mu_);
      const Entry& e = entry(req.matches[1]);
      if (!e.context.schema || !e.context.target) {
        fail("MissingContext", "session has no schema or target ontology to compile against");
      }
      pipeline::CompileOptions opts;
      opts.property_threshold = body.value("propertyThreshold", pipeline::kPropertyMatchThreshold);
      opts.hash_fallback = body.value("hashFallback", false);
      opts.provenance = e.context.provenance;
      opts.provenance.session_id = e.session.id();
      const auto config = pipeline::compile_config(e.session, *e.context.schema, *e.context.target, opts);
      const Json doc = config.to_json();
      if (e.context.persist_dir) {
        io::write_file(*e.context.persist_dir / pipeline::artifact::kConfig, dump_pretty(doc));
      }
      send_json(res, doc);
    });
  });
}

}  // namespace vforge::review
