#pragma once

#include <atomic>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "vforge/bus.hpp"
#include "vforge/document.hpp"
#include "vforge/flavours.hpp"
#include "vforge/ngsild.hpp"
#include "vforge/translation.hpp"

namespace vforge::platform {

enum class SourceKind { FileReplay, HttpPoll, BusIngest };

std::string_view source_kind_name(SourceKind k);
SourceKind parse_source_kind(std::string_view s);

struct VThingSpec {
  std::string name;
  std::string type;  // entities of this type are routed here; empty accepts all
};

struct ThingVisorDescriptor {
  std::string id;
  SourceKind source_kind = SourceKind::FileReplay;
  Json source_config = Json::object();
  std::optional<std::string> translation_config_ref;
  std::vector<VThingSpec> vthings;

  Json to_json() const;
  /// vthings may be given as names or as {"name", "type"} objects.
  static ThingVisorDescriptor from_json(const Json& doc);
};

struct VThingDescriptor {
  std::string id;  // {thingVisorId}/{vThingName}
  std::string thingvisor;
  std::string name;
  std::string type;
  std::set<std::string> entity_ids;

  Json to_json() const;
};

struct VSiloDescriptor {
  std::string id;
  std::string tenant;
  Flavour flavour = Flavour::NgsiLd;
  std::set<std::string> added_vthings;

  Json to_json() const;
};

/// `TV/{thingVisorId}/{vThingName}/data_out`
bus::Topic data_out_topic(std::string_view thingvisor, std::string_view vthing);

/// Flavour-native store of one vSilo. Updates are applied serially.
class VSilo {
public:
  explicit VSilo(VSiloDescriptor desc);

  const VSiloDescriptor& descriptor() const noexcept { return desc_; }

  /// Upserts into the store; returns MQTT records to republish (mqtt flavour only).
  std::vector<MqttRecord> apply(const std::string& vthing_id, const ngsild::Entity& e);

  /// Latest state of one entity, by full id or by last id segment. NotFound otherwise.
  Json retrieve(std::string_view entity_ref) const;
  /// Whole store in flavour-native form, deterministic order.
  Json dump() const;
  std::size_t updates() const;

private:
  friend class MasterController;

  struct Node {
    std::string type;  // CSEBase, AE, cnt, cin
    std::optional<std::string> label;
    std::optional<std::string> content;
    std::vector<std::string> children;
    std::size_t next_cin = 1;
  };

  const ngsild::Entity* find_entity(std::string_view ref) const;
  void apply_onem2m(const std::vector<OneM2MResourceOp>& ops);
  Json node_to_json(const std::string& path) const;

  VSiloDescriptor desc_;
  mutable std::mutex mu_;
  std::size_t updates_ = 0;
  std::map<std::string, ngsild::Entity> entities_;            // merged canonical state
  std::map<std::string, std::string> entity_vthing_;          // id -> first vThing seen
  std::map<std::string, Node> tree_;                          // onem2m, keyed by path
  std::vector<Json> journal_;                                 // onem2m op log
  std::map<std::string, std::map<std::string, std::string>> topics_;  // mqtt: id -> topic -> payload
};

/// Registry of ThingVisors, vThings and vSilos, wired through the bus.
class MasterController {
public:
  explicit MasterController(bus::Bus& bus);
  ~MasterController();

  MasterController(const MasterController&) = delete;
  MasterController& operator=(const MasterController&) = delete;

  /// Errors: InvalidId, DuplicateId, InvalidSourceConfig, ConfigNotFound.
  std::string register_thingvisor(ThingVisorDescriptor desc);
  std::vector<ThingVisorDescriptor> thingvisors() const;
  std::vector<VThingDescriptor> vthings() const;

  /// Default id `{tenant}-{flavour}`. Errors: UnknownFlavour, DuplicateId.
  VSiloDescriptor create_vsilo(const std::string& tenant, std::string_view flavour,
                               std::optional<std::string> silo_id = std::nullopt);
  std::vector<VSiloDescriptor> vsilos() const;

  /// Errors: UnknownSilo, UnknownVThing, AlreadyAdded.
  void add_vthing_to_silo(const std::string& silo_id, const std::string& vthing_id);

  /// One bus message unless `entities` is empty. Returns the delivery count.
  std::size_t publish_vthing_update(const std::string& thingvisor, const std::string& vthing,
                                    const std::vector<ngsild::Entity>& entities);

  /// Routes entities to the ThingVisor's vThings by type and publishes them.
  std::size_t ingest(const std::string& thingvisor, const std::vector<ngsild::Entity>& entities);
  /// Raw source records: translated when the ThingVisor has a config, parsed as entities otherwise.
  std::size_t ingest_records(const std::string& thingvisor, const std::vector<Json>& records);

  /// One synchronous pass over a file-replay source; returns entities published.
  std::size_t replay(const std::string& thingvisor);

  Json silo_retrieve(const std::string& silo_id, std::string_view entity_ref) const;
  Json silo_dump(const std::string& silo_id) const;

  /// Waits until the bus has delivered everything published so far.
  void flush();
  /// Stops replay and poll loops and cancels silo subscriptions.
  void stop();

private:
  struct ThingVisor {
    ThingVisorDescriptor desc;
    std::optional<pipeline::TranslationConfig> config;
    bus::Subscription ingest_sub;
  };

  std::shared_ptr<VSilo> silo(const std::string& id) const;
  void validate(const ThingVisorDescriptor& d) const;
  void start_loop(const std::string& id);
  /// Sleeps up to `ms`; false once stop() was called.
  bool wait_for(std::int64_t ms);
  std::vector<Json> read_source_file(const ThingVisorDescriptor& d) const;

  bus::Bus& bus_;
  mutable std::mutex mu_;
  std::map<std::string, ThingVisor> thingvisors_;
  std::map<std::string, VThingDescriptor> vthings_;
  std::map<std::string, std::shared_ptr<VSilo>> silos_;
  std::vector<bus::Subscription> silo_subs_;
  std::vector<std::thread> loops_;
  std::atomic<bool> stopping_{false};
  std::mutex stop_mu_;
  std::condition_variable stop_cv_;
};

}  // namespace vforge::platform
