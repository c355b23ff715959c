#include "vforge/platform_api.hpp"

#include "vforge/http_api.hpp"

namespace vforge::platform {

namespace {

Json list_json(const auto& items) {
  Json out = Json::array();
  for (const auto& i : items) out.push_back(i.to_json());
  return out;
}

}  // namespace

void mount_platform_api(httplib::Server& server, MasterController& mc) {
  using httplib::Request;
  using httplib::Response;
  using http::guarded;
  using http::send_json;

  server.Post("/api/thingvisors", [&mc](const Request& req, Response& res) {
    guarded(res, [&] {
      auto desc = ThingVisorDescriptor::from_json(http::body_json(req));
      mc.register_thingvisor(desc);
      send_json(res, desc.to_json(), 201);
    });
  });
  server.Get("/api/thingvisors", [&mc](const Request&, Response& res) {
    guarded(res, [&] { send_json(res, list_json(mc.thingvisors())); });
  });
  server.Get("/api/vthings", [&mc](const Request&, Response& res) {
    guarded(res, [&] { send_json(res, list_json(mc.vthings())); });
  });
  server.Post("/api/vsilos", [&mc](const Request& req, Response& res) {
    guarded(res, [&] {
      const Json body = http::body_json(req);
      if (!body.contains("tenantId") || !body["tenantId"].is_string()) fail("MissingField", "tenantId required");
      if (!body.contains("flavour") || !body["flavour"].is_string()) fail("MissingField", "flavour required");
      std::optional<std::string> id;
      if (body.contains("siloId") && body["siloId"].is_string()) id = body["siloId"].get<std::string>();
      auto d = mc.create_vsilo(body["tenantId"].get<std::string>(), body["flavour"].get<std::string>(), id);
      send_json(res, d.to_json(), 201);
    });
  });
  server.Get("/api/vsilos", [&mc](const Request&, Response& res) {
    guarded(res, [&] { send_json(res, list_json(mc.vsilos())); });
  });
  server.Post(R"(/api/vsilos/([^/]+)/vthings)", [&mc](const Request& req, Response& res) {
    guarded(res, [&] {
      const Json body = http::body_json(req);
      if (!body.contains("vThingId") || !body["vThingId"].is_string()) fail("MissingField", "vThingId required");
      const std::string silo = req.matches[1];
      mc.add_vthing_to_silo(silo, body["vThingId"].get<std::string>());
      for (const auto& d : mc.vsilos()) {
        if (d.id == silo) send_json(res, d.to_json());
      }
    });
  });
  server.Get(R"(/api/vsilos/([^/]+)/entities/(.+))", [&mc](const Request& req, Response& res) {
    guarded(res, [&] { send_json(res, mc.silo_retrieve(req.matches[1], std::string(req.matches[2]))); });
  });
  server.Post(R"(/api/thingvisors/([^/]+)/replay)", [&mc](const Request& req, Response& res) {
    guarded(res, [&] {
      const auto n = mc.replay(req.matches[1]);
      mc.flush();
      send_json(res, {{"published", n}});
    });
  });
  server.Post(R"(/api/thingvisors/([^/]+)/data)", [&mc](const Request& req, Response& res) {
    guarded(res, [&] {
      Json body = http::body_json(req);
      std::vector<Json> records;
      if (body.is_array()) {
        records.assign(body.begin(), body.end());
      } else {
        records.push_back(std::move(body));
      }
      const auto n = mc.ingest_records(req.matches[1], records);
      mc.flush();
      send_json(res, {{"published", n}});
    });
  });
}

}  // namespace vforge::platform
