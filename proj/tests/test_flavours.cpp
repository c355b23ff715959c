#include <random>
#include <set>

#include "doctest.h"
#include "support.hpp"
#include "vforge/bus.hpp"
#include "vforge/error.hpp"
#include "vforge/flavours.hpp"

using namespace vforge;
using namespace vforge::platform;

namespace {

constexpr const char* kTenant = "t1";
constexpr const char* kVThing = "tv1/vt1";

Json ops_json(const std::vector<OneM2MResourceOp>& ops) {
  Json out = Json::array();
  for (const auto& op : ops) out.push_back(op.to_json());
  return out;
}

Json records_json(const std::vector<MqttRecord>& records) {
  Json out = Json::array();
  for (const auto& r : records) out.push_back({{"topic", r.topic}, {"payload", r.payload}});
  return out;
}

/// Drops sub-attributes other than observedAt/unitCode, which NGSIv2 cannot carry losslessly.
ngsild::Entity convertible(ngsild::Entity e) {
  for (auto& a : e.attributes) a.attribute.sub_attributes.clear();
  return e;
}

}  // namespace

TEST_CASE("flavour names") {
  CHECK(parse_flavour("onem2m") == Flavour::OneM2M);
  CHECK(parse_flavour("ngsiv2") == Flavour::NgsiV2);
  CHECK(parse_flavour("ngsild") == Flavour::NgsiLd);
  CHECK(parse_flavour("mqtt") == Flavour::Mqtt);
  try {
    parse_flavour("graphdb");
    FAIL("expected UnknownFlavour");
  } catch (const Error& e) {
    CHECK(e.code() == "UnknownFlavour");
  }
  CHECK(sanitize("tv1/vt1") == "tv1_vt1");
  CHECK(sanitize("urn:ngsi-ld:Car:1") == "urn_ngsi-ld_Car_1");
}

TEST_CASE("ngsiv2 conversion of the fixtures") {
  const Json car = convert_to_ngsiv2(test::car_entity());
  CHECK(dump_compact(car["speed"]) == R"({"type":"Number","value":55,"metadata":{}})");
  const Json cam = convert_to_ngsiv2(test::camera_entity());
  CHECK(dump_compact(cam["attachedTo"]) == R"({"type":"Relationship","value":"urn:ngsi-ld:PowerPole:p1"})");
  CHECK(car["id"] == "urn:ngsi-ld:Car:1");
  CHECK(car["type"] == "Car");
}

TEST_CASE("ngsiv2 attribute types and metadata") {
  CHECK(ngsiv2_type_of(1.5) == "Number");
  CHECK(ngsiv2_type_of("abc") == "Text");
  CHECK(ngsiv2_type_of(true) == "Boolean");
  CHECK(ngsiv2_type_of("2024-05-01T10:00:00Z") == "DateTime");
  CHECK(ngsiv2_type_of(Json::object()) == "StructuredValue");
  CHECK(ngsiv2_type_of(Json::array()) == "StructuredValue");

  auto e = test::car_entity();
  auto a = ngsild::Attribute::property(55);
  a.observed_at = "2024-05-01T10:00:00Z";
  a.unit_code = "KMH";
  e = ngsild::apply_update(e, "speed", a);
  const Json v2 = convert_to_ngsiv2(e);
  CHECK(dump_compact(v2["speed"]["metadata"]) ==
        R"({"timestamp":{"type":"DateTime","value":"2024-05-01T10:00:00Z"},"unitCode":{"type":"Text","value":"KMH"}})");
}

TEST_CASE("ngsiv2 round trip on the convertible subset") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    auto e = test::random_entity(rng, false);
    e.types.resize(1);
    e = convertible(e);
    REQUIRE(convert_from_ngsiv2(convert_to_ngsiv2(e)) == e);
  }
}

TEST_CASE("onem2m op structure") {
  const auto ops = convert_to_onem2m(test::car_entity(), kTenant, kVThing);
  REQUIRE(ops.size() == 4);
  CHECK(ops[0].kind == OneM2MOpKind::EnsureAE);
  CHECK(ops[0].parent_path == kCseRoot);
  CHECK(ops[0].resource_name == "tv1_vt1");
  CHECK(ops[1].kind == OneM2MOpKind::EnsureContainer);
  CHECK(ops[1].resource_name == "urn_ngsi-ld_Car_1");
  CHECK(ops[2].kind == OneM2MOpKind::EnsureContainer);
  CHECK(ops[2].resource_name == "speed");
  CHECK(ops[3].kind == OneM2MOpKind::CreateContentInstance);
  CHECK(ops[3].content == R"({"type":"Property","value":55})");

  const auto empty = convert_to_onem2m(ngsild::parse_entity(R"({"id":"urn:ngsi-ld:Shop:s1","type":"Shop"})"), kTenant, kVThing);
  CHECK(empty.size() == 2);
}

TEST_CASE("onem2m parent paths are produced earlier in the batch") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto ops = convert_to_onem2m(test::random_entity(rng), kTenant, kVThing);
    std::set<std::string> known = {std::string(kCseRoot)};
    for (const auto& op : ops) {
      CHECK(known.count(op.parent_path) == 1);
      if (op.kind != OneM2MOpKind::CreateContentInstance) known.insert(op.parent_path + "/" + op.resource_name);
    }
  }
}

TEST_CASE("mqtt records") {
  auto car = test::car_entity();
  car = ngsild::apply_update(car, "location", ngsild::Attribute::property({{"type", "Point"}, {"coordinates", {139.7, 35.0}}}));
  const auto recs = convert_to_mqtt_records(car, kTenant, kVThing);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].topic == "vSilo/t1/tv1_vt1/1/speed");
  CHECK(recs[1].topic == "vSilo/t1/tv1_vt1/1/location");
}

TEST_CASE("mqtt topics are always valid") {
  std::mt19937_64 rng(9);
  const std::vector<std::string> odd = {"a+b", "x#", "", "spa ce", "s/l/a/s/h"};
  for (int i = 0; i < 500; ++i) {
    auto e = test::random_entity(rng);
    const std::string tenant = odd[static_cast<std::size_t>(i) % odd.size()];
    const std::string vthing = odd[static_cast<std::size_t>(i + 2) % odd.size()] + "/v";
    for (const auto& r : convert_to_mqtt_records(e, tenant, vthing)) {
      CHECK_NOTHROW(bus::Topic::parse(r.topic));
    }
  }
}

TEST_CASE("flavour outputs are pure functions of the entity") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 100; ++i) {
    const auto e = test::random_entity(rng);
    CHECK(convert_to_onem2m(e, kTenant, kVThing) == convert_to_onem2m(e, kTenant, kVThing));
    CHECK(convert_to_mqtt_records(e, kTenant, kVThing) == convert_to_mqtt_records(e, kTenant, kVThing));
  }
}

TEST_CASE("golden flavour outputs") {
  const std::pair<const char*, ngsild::Entity> fixtures[] = {{"car_speed", test::car_entity()},
                                                              {"camera_attachedTo", test::camera_entity()}};
  for (const auto& [name, e] : fixtures) {
    CAPTURE(name);
    CHECK(test::matches_golden(std::string(name) + ".ngsiv2.json", dump_pretty(convert_to_ngsiv2(e))));
    CHECK(test::matches_golden(std::string(name) + ".onem2m.json", dump_pretty(ops_json(convert_to_onem2m(e, kTenant, kVThing)))));
    CHECK(test::matches_golden(std::string(name) + ".mqtt.json", dump_pretty(records_json(convert_to_mqtt_records(e, kTenant, kVThing)))));
  }
}
