#include "vforge/platform.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>

#include "httplib.h"
#include "vforge/error.hpp"
#include "vforge/io.hpp"

namespace vforge::platform {

using ngsild::Entity;

std::string_view source_kind_name(SourceKind k) {
  switch (k) {
    case SourceKind::FileReplay: return "file-replay";
    case SourceKind::HttpPoll: return "http-poll";
    case SourceKind::BusIngest: return "bus-ingest";
  }
  return "";
}

SourceKind parse_source_kind(std::string_view s) {
  for (auto k : {SourceKind::FileReplay, SourceKind::HttpPoll, SourceKind::BusIngest}) {
    if (source_kind_name(k) == s) return k;
  }
  fail("InvalidSourceConfig", "unknown sourceKind '" + std::string(s) + "'");
}

Json ThingVisorDescriptor::to_json() const {
  Json vts = Json::array();
  for (const auto& v : vthings) vts.push_back({{"name", v.name}, {"type", v.type}});
  Json j = {{"id", id}, {"sourceKind", source_kind_name(source_kind)}, {"sourceConfig", source_config}};
  j["translationConfigRef"] = translation_config_ref ? Json(*translation_config_ref) : Json(nullptr);
  j["vthings"] = std::move(vts);
  return j;
}

ThingVisorDescriptor ThingVisorDescriptor::from_json(const Json& doc) {
  if (!doc.is_object()) fail("MalformedDocument", "ThingVisor descriptor must be an object");
  ThingVisorDescriptor d;
  if (!doc.contains("id") || !doc["id"].is_string()) fail("MissingField", "ThingVisor descriptor lacks id");
  d.id = doc["id"].get<std::string>();
  if (!doc.contains("sourceKind") || !doc["sourceKind"].is_string()) {
    fail("MissingField", "ThingVisor descriptor lacks sourceKind");
  }
  d.source_kind = parse_source_kind(doc["sourceKind"].get<std::string>());
  d.source_config = doc.value("sourceConfig", Json::object());
  if (doc.contains("translationConfigRef") && doc["translationConfigRef"].is_string()) {
    d.translation_config_ref = doc["translationConfigRef"].get<std::string>();
  }
  for (const auto& v : doc.value("vthings", Json::array())) {
    if (v.is_string()) {
      d.vthings.push_back({v.get<std::string>(), ""});
    } else if (v.is_object() && v.contains("name") && v["name"].is_string()) {
      d.vthings.push_back({v["name"].get<std::string>(), v.value("type", "")});
    } else {
      fail("MalformedDocument", "vthings entries are names or {name, type} objects");
    }
  }
  return d;
}

Json VThingDescriptor::to_json() const {
  return {{"vThingId", id}, {"thingVisorId", thingvisor}, {"name", name}, {"type", type}, {"entityIds", entity_ids}};
}

Json VSiloDescriptor::to_json() const {
  return {{"siloId", id}, {"tenantId", tenant}, {"flavour", flavour_name(flavour)}, {"addedVThings", added_vthings}};
}

bus::Topic data_out_topic(std::string_view thingvisor, std::string_view vthing) {
  return bus::Topic::from_segments({"TV", std::string(thingvisor), std::string(vthing), "data_out"});
}

// ---------------------------------------------------------------- VSilo

VSilo::VSilo(VSiloDescriptor desc) : desc_(std::move(desc)) {
  if (desc_.flavour == Flavour::OneM2M) tree_[std::string(kCseRoot)] = Node{"CSEBase", {}, {}, {}, 1};
}

std::size_t VSilo::updates() const {
  std::lock_guard lock(mu_);
  return updates_;
}

void VSilo::apply_onem2m(const std::vector<OneM2MResourceOp>& ops) {
  for (const auto& op : ops) {
    auto parent = tree_.find(op.parent_path);
    if (parent == tree_.end()) fail("InternalError", "oneM2M parent " + op.parent_path + " missing");
    std::string name = op.resource_name;
    std::string type;
    switch (op.kind) {
      case OneM2MOpKind::EnsureAE: type = "AE"; break;
      case OneM2MOpKind::EnsureContainer: type = "cnt"; break;
      case OneM2MOpKind::CreateContentInstance: {
        type = "cin";
        char buf[24];
        std::snprintf(buf, sizeof buf, "cin_%06zu", parent->second.next_cin++);
        name = buf;
        break;
      }
    }
    const std::string path = op.parent_path + "/" + name;
    auto [it, created] = tree_.try_emplace(path);
    if (created) {
      it->second.type = type;
      if (op.kind == OneM2MOpKind::EnsureAE) it->second.label = op.content;
      if (op.kind == OneM2MOpKind::CreateContentInstance) it->second.content = op.content;
      tree_[op.parent_path].children.push_back(name);
    }
    Json entry = op.to_json();
    entry["resourceName"] = name;
    journal_.push_back(std::move(entry));
  }
}

std::vector<MqttRecord> VSilo::apply(const std::string& vthing_id, const Entity& e) {
  std::lock_guard lock(mu_);
  ++updates_;
  const std::string& key = e.id.str();
  entity_vthing_.try_emplace(key, vthing_id);

  auto it = entities_.find(key);
  if (it == entities_.end()) {
    entities_.emplace(key, e);
  } else {
    Entity merged = std::move(it->second);
    merged.types = e.types;
    for (const auto& na : e.attributes) merged = ngsild::apply_update(std::move(merged), na.name, na.attribute);
    it->second = std::move(merged);
  }

  std::vector<MqttRecord> out;
  switch (desc_.flavour) {
    case Flavour::OneM2M:
      apply_onem2m(convert_to_onem2m(e, desc_.tenant, vthing_id));
      break;
    case Flavour::Mqtt:
      out = convert_to_mqtt_records(e, desc_.tenant, vthing_id);
      for (const auto& r : out) topics_[key][r.topic] = r.payload;
      break;
    case Flavour::NgsiV2:
    case Flavour::NgsiLd:
      break;
  }
  return out;
}

const Entity* VSilo::find_entity(std::string_view ref) const {
  if (auto it = entities_.find(std::string(ref)); it != entities_.end()) return &it->second;
  const Entity* hit = nullptr;
  for (const auto& [id, e] : entities_) {
    if (e.id.last_segment() != ref) continue;
    if (hit) fail("AmbiguousReference", "entity reference '" + std::string(ref) + "' matches several entities");
    hit = &e;
  }
  return hit;
}

Json VSilo::retrieve(std::string_view entity_ref) const {
  std::lock_guard lock(mu_);
  const Entity* e = find_entity(entity_ref);
  if (!e) fail("NotFound", "silo " + desc_.id + " has no entity '" + std::string(entity_ref) + "'");
  switch (desc_.flavour) {
    case Flavour::NgsiLd: return ngsild::entity_to_json(*e);
    case Flavour::NgsiV2: return convert_to_ngsiv2(*e);
    case Flavour::Mqtt: {
      Json out = Json::object();
      if (auto it = topics_.find(e->id.str()); it != topics_.end()) {
        for (const auto& [topic, payload] : it->second) out[topic] = parse_json(payload);
      }
      return out;
    }
    case Flavour::OneM2M: {
      const std::string ae = std::string(kCseRoot) + "/" + sanitize(entity_vthing_.at(e->id.str()));
      const std::string container = ae + "/" + sanitize(e->id.str());
      Json attrs = Json::object();
      for (const auto& attr : tree_.at(container).children) {
        const Node& cnt = tree_.at(container + "/" + attr);
        const Node& latest = tree_.at(container + "/" + attr + "/" + cnt.children.back());
        attrs[attr] = {{"cni", cnt.children.size()}, {"la", parse_json(*latest.content)}};
      }
      return {{"ae", ae}, {"container", container}, {"attributes", std::move(attrs)}};
    }
  }
  return nullptr;
}

Json VSilo::node_to_json(const std::string& path) const {
  const Node& n = tree_.at(path);
  Json j = Json::object();
  j["rn"] = path.substr(path.rfind('/') == std::string::npos ? 0 : path.rfind('/') + 1);
  j["ty"] = n.type;
  if (n.label) j["lbl"] = *n.label;
  if (n.content) j["con"] = *n.content;
  if (!n.children.empty()) {
    // Sorted so the dump does not depend on how deliveries from different vThings interleave.
    auto names = n.children;
    std::sort(names.begin(), names.end());
    Json ch = Json::array();
    for (const auto& c : names) ch.push_back(node_to_json(path + "/" + c));
    j["ch"] = std::move(ch);
  }
  return j;
}

Json VSilo::dump() const {
  std::lock_guard lock(mu_);
  Json out = {{"silo", desc_.to_json()}};
  switch (desc_.flavour) {
    case Flavour::NgsiLd: {
      Json list = Json::array();
      for (const auto& [_, e] : entities_) list.push_back(ngsild::entity_to_json(e));
      out["entities"] = std::move(list);
      break;
    }
    case Flavour::NgsiV2: {
      Json list = Json::array();
      for (const auto& [_, e] : entities_) list.push_back(convert_to_ngsiv2(e));
      out["entities"] = std::move(list);
      break;
    }
    case Flavour::Mqtt: {
      Json topics = Json::object();
      std::map<std::string, std::string> flat;
      for (const auto& [_, per] : topics_) flat.insert(per.begin(), per.end());
      for (const auto& [t, p] : flat) topics[t] = parse_json(p);
      out["topics"] = std::move(topics);
      break;
    }
    case Flavour::OneM2M: {
      out["resources"] = node_to_json(std::string(kCseRoot));
      // Per-container order is FIFO and kept; only cross-vThing interleaving is normalized.
      auto journal = journal_;
      const auto key = [](const Json& e) {
        const bool cin = e["opKind"] == "create-ContentInstance";
        return std::pair(e["parentPath"].get<std::string>(), cin ? std::string() : e["resourceName"].get<std::string>());
      };
      std::stable_sort(journal.begin(), journal.end(), [&](const Json& a, const Json& b) { return key(a) < key(b); });
      out["journal"] = std::move(journal);
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------- MasterController

MasterController::MasterController(bus::Bus& bus) : bus_(bus) {}

MasterController::~MasterController() { stop(); }

void MasterController::stop() {
  {
    std::lock_guard lock(stop_mu_);
    stopping_ = true;
  }
  stop_cv_.notify_all();
  for (auto& t : loops_) {
    if (t.joinable()) t.join();
  }
  loops_.clear();
  std::lock_guard lock(mu_);
  for (auto& s : silo_subs_) s.cancel();
  silo_subs_.clear();
  for (auto& [_, tv] : thingvisors_) tv.ingest_sub.cancel();
}

bool MasterController::wait_for(std::int64_t ms) {
  std::unique_lock lock(stop_mu_);
  return !stop_cv_.wait_for(lock, std::chrono::milliseconds(ms), [this] { return stopping_.load(); });
}

void MasterController::validate(const ThingVisorDescriptor& d) const {
  static const std::regex slug("^[a-z0-9-]+$");
  if (!std::regex_match(d.id, slug)) fail("InvalidId", "ThingVisor id '" + d.id + "' is not a [a-z0-9-] slug");
  if (d.vthings.empty()) fail("InvalidSourceConfig", "ThingVisor " + d.id + " declares no vThings");
  std::set<std::string> names;
  for (const auto& v : d.vthings) {
    if (v.name.empty() || v.name.find_first_of("/+#") != std::string::npos) {
      fail("InvalidSourceConfig", "invalid vThing name '" + v.name + "'");
    }
    if (!names.insert(v.name).second) fail("DuplicateId", "vThing " + v.name + " declared twice");
  }
  const Json& c = d.source_config;
  if (!c.is_object()) fail("InvalidSourceConfig", "sourceConfig must be an object");
  auto need_string = [&](const char* key) {
    if (!c.contains(key) || !c[key].is_string() || c[key].get<std::string>().empty()) {
      fail("InvalidSourceConfig", std::string(source_kind_name(d.source_kind)) + " needs a '" + key + "' string");
    }
  };
  auto interval_ok = [&](bool required) {
    if (!c.contains("intervalMs")) {
      if (required) fail("InvalidSourceConfig", "http-poll needs intervalMs");
      return;
    }
    if (!c["intervalMs"].is_number_integer() || c["intervalMs"].get<std::int64_t>() <= 0) {
      fail("InvalidSourceConfig", "intervalMs must be a positive integer");
    }
  };
  switch (d.source_kind) {
    case SourceKind::FileReplay:
      need_string("path");
      interval_ok(false);
      break;
    case SourceKind::HttpPoll: {
      need_string("url");
      if (c["url"].get<std::string>().rfind("http://", 0) != 0) {
        fail("InvalidSourceConfig", "http-poll url must start with http://");
      }
      interval_ok(true);
      break;
    }
    case SourceKind::BusIngest:
      need_string("topic");
      try {
        bus::TopicFilter::parse(c["topic"].get<std::string>());
      } catch (const Error& e) {
        fail("InvalidSourceConfig", std::string("bus-ingest topic: ") + e.what());
      }
      break;
  }
}

std::string MasterController::register_thingvisor(ThingVisorDescriptor desc) {
  validate(desc);
  std::optional<pipeline::TranslationConfig> config;
  if (desc.translation_config_ref) config = pipeline::TranslationConfig::load(*desc.translation_config_ref);

  const std::string id = desc.id;
  {
    std::lock_guard lock(mu_);
    if (thingvisors_.count(id)) fail("DuplicateId", "ThingVisor " + id + " already registered");
    for (const auto& v : desc.vthings) {
      if (vthings_.count(id + "/" + v.name)) fail("DuplicateId", "vThing " + id + "/" + v.name + " exists");
    }
    for (const auto& v : desc.vthings) {
      VThingDescriptor vd;
      vd.id = id + "/" + v.name;
      vd.thingvisor = id;
      vd.name = v.name;
      vd.type = v.type;
      vthings_.emplace(vd.id, std::move(vd));
    }
    thingvisors_.emplace(id, ThingVisor{desc, std::move(config), {}});
  }

  if (desc.source_kind == SourceKind::BusIngest) {
    auto sub = bus_.subscribe(bus::TopicFilter::parse(desc.source_config["topic"].get<std::string>()),
                              [this, id](const bus::Message& m) {
                                Json doc;
                                try {
                                  doc = parse_json(m.payload);
                                } catch (const Error&) {
                                  return;  // not a document; nothing to ingest
                                }
                                std::vector<Json> records;
                                if (doc.is_object() && doc.contains("data") && doc["data"].is_array()) {
                                  records.assign(doc["data"].begin(), doc["data"].end());
                                } else if (doc.is_array()) {
                                  records.assign(doc.begin(), doc.end());
                                } else {
                                  records.push_back(std::move(doc));
                                }
                                try {
                                  ingest_records(id, records);
                                } catch (const Error&) {
                                  // malformed upstream data must not stop the dispatcher
                                }
                              });
    std::lock_guard lock(mu_);
    thingvisors_.at(id).ingest_sub = sub;
  } else if (desc.source_config.contains("intervalMs")) {
    start_loop(id);
  }
  return id;
}

void MasterController::start_loop(const std::string& id) {
  loops_.emplace_back([this, id] {
    ThingVisorDescriptor d;
    {
      std::lock_guard lock(mu_);
      d = thingvisors_.at(id).desc;
    }
    const auto interval = d.source_config["intervalMs"].get<std::int64_t>();
    if (d.source_kind == SourceKind::FileReplay) {
      const bool loop = d.source_config.value("loop", false);
      do {
        std::vector<Json> records;
        try {
          records = read_source_file(d);
        } catch (const Error&) {
          return;
        }
        for (const auto& r : records) {
          if (!wait_for(interval)) return;
          try {
            ingest_records(id, {r});
          } catch (const Error&) {
          }
        }
      } while (loop && !stopping_);
      return;
    }
    // http-poll
    const std::string url = d.source_config["url"].get<std::string>();
    const auto slash = url.find('/', 7);
    const std::string host = slash == std::string::npos ? url : url.substr(0, slash);
    const std::string path = slash == std::string::npos ? "/" : url.substr(slash);
    httplib::Client client(host);
    client.set_connection_timeout(2);
    while (wait_for(interval)) {
      auto res = client.Get(path);
      if (!res || res->status != 200) continue;
      try {
        std::vector<Json> records;
        const auto trimmed = res->body.find_first_not_of(" \t\r\n");
        if (trimmed != std::string::npos && res->body[trimmed] == '[') {
          auto doc = parse_json(res->body);
          records.assign(doc.begin(), doc.end());
        } else {
          records = io::parse_json_lines(res->body);
        }
        ingest_records(id, records);
      } catch (const Error&) {
      }
    }
  });
}

std::vector<ThingVisorDescriptor> MasterController::thingvisors() const {
  std::lock_guard lock(mu_);
  std::vector<ThingVisorDescriptor> out;
  for (const auto& [_, tv] : thingvisors_) out.push_back(tv.desc);
  return out;
}

std::vector<VThingDescriptor> MasterController::vthings() const {
  std::lock_guard lock(mu_);
  std::vector<VThingDescriptor> out;
  for (const auto& [_, v] : vthings_) out.push_back(v);
  return out;
}

VSiloDescriptor MasterController::create_vsilo(const std::string& tenant, std::string_view flavour,
                                               std::optional<std::string> silo_id) {
  const Flavour f = parse_flavour(flavour);
  if (tenant.empty() || tenant.find_first_of("/+#") != std::string::npos) {
    fail("InvalidId", "invalid tenant id '" + tenant + "'");
  }
  VSiloDescriptor d;
  d.id = silo_id.value_or(tenant + "-" + std::string(flavour_name(f)));
  d.tenant = tenant;
  d.flavour = f;
  std::lock_guard lock(mu_);
  if (silos_.count(d.id)) fail("DuplicateId", "vSilo " + d.id + " already exists");
  silos_.emplace(d.id, std::make_shared<VSilo>(d));
  return d;
}

std::vector<VSiloDescriptor> MasterController::vsilos() const {
  std::lock_guard lock(mu_);
  std::vector<VSiloDescriptor> out;
  for (const auto& [_, s] : silos_) {
    std::lock_guard silo_lock(s->mu_);
    out.push_back(s->desc_);
  }
  return out;
}

std::shared_ptr<VSilo> MasterController::silo(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = silos_.find(id);
  if (it == silos_.end()) fail("UnknownSilo", "no vSilo " + id);
  return it->second;
}

void MasterController::add_vthing_to_silo(const std::string& silo_id, const std::string& vthing_id) {
  std::shared_ptr<VSilo> s = silo(silo_id);
  std::string tv;
  std::string name;
  {
    std::lock_guard lock(mu_);
    auto it = vthings_.find(vthing_id);
    if (it == vthings_.end()) fail("UnknownVThing", "no vThing " + vthing_id);
    tv = it->second.thingvisor;
    name = it->second.name;
    std::lock_guard silo_lock(s->mu_);
    if (!s->desc_.added_vthings.insert(vthing_id).second) {
      fail("AlreadyAdded", "vThing " + vthing_id + " is already in vSilo " + silo_id);
    }
  }
  auto sub = bus_.subscribe(bus::TopicFilter::parse(data_out_topic(tv, name).str()),
                            [this, s, vthing_id](const bus::Message& m) {
                              Json doc;
                              try {
                                doc = parse_json(m.payload);
                              } catch (const Error&) {
                                return;
                              }
                              if (!doc.is_object() || !doc.contains("data")) return;
                              for (const auto& ej : doc["data"]) {
                                try {
                                  auto records = s->apply(vthing_id, ngsild::entity_from_json(ej));
                                  for (auto& r : records) {
                                    bus_.publish(bus::Topic::parse(r.topic), std::move(r.payload), "vsilo");
                                  }
                                } catch (const Error&) {
                                }
                              }
                            });
  std::lock_guard lock(mu_);
  silo_subs_.push_back(std::move(sub));
}

std::size_t MasterController::publish_vthing_update(const std::string& thingvisor, const std::string& vthing,
                                                    const std::vector<Entity>& entities) {
  const std::string vid = thingvisor + "/" + vthing;
  {
    std::lock_guard lock(mu_);
    auto it = vthings_.find(vid);
    if (it == vthings_.end()) fail("UnknownVThing", "no vThing " + vid);
    for (const auto& e : entities) it->second.entity_ids.insert(e.id.str());
  }
  if (entities.empty()) return 0;
  Json data = Json::array();
  for (const auto& e : entities) data.push_back(ngsild::entity_to_json(e));
  Json payload = {{"data", std::move(data)}};
  return bus_.publish(data_out_topic(thingvisor, vthing), dump_compact(payload), thingvisor);
}

std::size_t MasterController::ingest(const std::string& thingvisor, const std::vector<Entity>& entities) {
  std::vector<VThingSpec> specs;
  {
    std::lock_guard lock(mu_);
    auto it = thingvisors_.find(thingvisor);
    if (it == thingvisors_.end()) fail("NotFound", "no ThingVisor " + thingvisor);
    specs = it->second.desc.vthings;
  }
  std::size_t published = 0;
  for (const auto& spec : specs) {
    std::vector<Entity> batch;
    for (const auto& e : entities) {
      const bool match = spec.type.empty() || std::find(e.types.begin(), e.types.end(), spec.type) != e.types.end();
      if (match) batch.push_back(e);
    }
    publish_vthing_update(thingvisor, spec.name, batch);
    published += batch.size();
  }
  return published;
}

std::size_t MasterController::ingest_records(const std::string& thingvisor, const std::vector<Json>& records) {
  std::optional<pipeline::TranslationConfig> config;
  {
    std::lock_guard lock(mu_);
    auto it = thingvisors_.find(thingvisor);
    if (it == thingvisors_.end()) fail("NotFound", "no ThingVisor " + thingvisor);
    config = it->second.config;
  }
  std::vector<Entity> entities;
  for (const auto& r : records) {
    if (config) {
      auto translated = pipeline::translate(*config, r);
      entities.insert(entities.end(), translated.begin(), translated.end());
    } else {
      entities.push_back(ngsild::entity_from_json(r));
    }
  }
  return ingest(thingvisor, entities);
}

std::vector<Json> MasterController::read_source_file(const ThingVisorDescriptor& d) const {
  return io::read_json_lines(d.source_config["path"].get<std::string>());
}

std::size_t MasterController::replay(const std::string& thingvisor) {
  ThingVisorDescriptor d;
  {
    std::lock_guard lock(mu_);
    auto it = thingvisors_.find(thingvisor);
    if (it == thingvisors_.end()) fail("NotFound", "no ThingVisor " + thingvisor);
    d = it->second.desc;
  }
  if (d.source_kind != SourceKind::FileReplay) {
    fail("InvalidArgument", "ThingVisor " + thingvisor + " is not a file-replay source");
  }
  // Record by record so each source record is one data_out message per vThing.
  std::size_t n = 0;
  for (const auto& r : read_source_file(d)) n += ingest_records(thingvisor, {r});
  return n;
}

Json MasterController::silo_retrieve(const std::string& silo_id, std::string_view entity_ref) const {
  return silo(silo_id)->retrieve(entity_ref);
}

Json MasterController::silo_dump(const std::string& silo_id) const { return silo(silo_id)->dump(); }

void MasterController::flush() { bus_.flush(); }

}  // namespace vforge::platform
