#include <chrono>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "vforge/error.hpp"
#include "vforge/fixtures.hpp"
#include "vforge/io.hpp"
#include "vforge/pipeline.hpp"
#include "vforge/translation.hpp"

using namespace vforge;
using namespace vforge::pipeline;

namespace {

std::string code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

std::vector<Json> weather() { return io::parse_json_lines(std::string(fixtures::weather_samples())); }
onto::Ontology backbone() { return onto::Ontology::parse(fixtures::backbone_ontology()); }

const PipelineResult& weather_run() {
  static const PipelineResult r = [] {
    PipelineOptions opts;
    opts.root_name = "weatherObserved";
    opts.auto_approve = true;
    opts.epoch = 0;
    return run_pipeline(weather(), backbone(), opts);
  }();
  return r;
}

/// Session over explicit pairs, every pair approved.
review::ReviewSession approved_session(const std::vector<std::pair<std::string, std::string>>& pairs) {
  ki::ScoreTable scores;
  for (const auto& [s, t] : pairs) scores.push_back({s, t, 0.9});
  auto session = review::ReviewSession::create(scores, ki::select_matching(scores), {});
  session.auto_approve();
  return session;
}

const ngsild::Attribute& attr(const ngsild::Entity& e, std::string_view name) {
  const auto* a = e.find(name);
  REQUIRE_MESSAGE(a, "missing attribute " << name);
  return *a;
}

/// Civil-date arithmetic written out by hand, independent of <chrono>.
long long days_from_civil(long long y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

std::string oracle_utc(long long secs) {
  long long days = secs / 86400, rem = secs % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  // inverse of days_from_civil by search within the year
  long long y = 1970 + days / 366;
  while (days_from_civil(y + 1, 1, 1) <= days) ++y;
  while (days_from_civil(y, 1, 1) > days) --y;
  unsigned m = 1;
  while (m < 12 && days_from_civil(y, m + 1, 1) <= days) ++m;
  const auto d = static_cast<unsigned>(days - days_from_civil(y, m, 1) + 1);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ", y, m, d, rem / 3600, rem % 3600 / 60,
                rem % 60);
  return buf;
}

}  // namespace

TEST_CASE("datetime normalization") {
  CHECK(normalize_datetime("2024-05-01T12:00:00+02:00") == "2024-05-01T10:00:00Z");
  CHECK(normalize_datetime("2024-05-01T10:05:00Z") == "2024-05-01T10:05:00Z");
  CHECK(normalize_datetime("2024-05-01") == "2024-05-01T00:00:00Z");
  CHECK(normalize_datetime("2024-01-01T01:00:00+0200") == "2023-12-31T23:00:00Z");
  CHECK(normalize_datetime("2024-12-31T23:30:00-01:00") == "2025-01-01T00:30:00Z");
  CHECK(normalize_datetime("2024-05-01T10:05:00.250Z") == "2024-05-01T10:05:00.250Z");
  CHECK(normalize_datetime("2024-05-01 10:05") == "2024-05-01T10:05:00Z");
  CHECK(code_of([] { normalize_datetime("2024-02-30"); }) == "InvalidArgument");
  CHECK(code_of([] { normalize_datetime("soon"); }) == "InvalidArgument");

  std::mt19937_64 rng(77);
  for (int i = 0; i < 2000; ++i) {
    const long long y = 1900 + static_cast<long long>(rng() % 250);
    const unsigned m = 1 + rng() % 12;
    const unsigned d = 1 + rng() % 28;
    const int hh = static_cast<int>(rng() % 24), mm = static_cast<int>(rng() % 60), ss = static_cast<int>(rng() % 60);
    const int off = (static_cast<int>(rng() % 29) - 14) * 30;  // minutes, -07:00..+07:00
    char text[40];
    std::snprintf(text, sizeof text, "%04lld-%02u-%02uT%02d:%02d:%02d%c%02d:%02d", y, m, d, hh, mm, ss,
                  off < 0 ? '-' : '+', std::abs(off) / 60, std::abs(off) % 60);
    const long long local = days_from_civil(y, m, d) * 86400 + hh * 3600 + mm * 60 + ss;
    CHECK(normalize_datetime(text) == oracle_utc(local - off * 60LL));
  }
}

TEST_CASE("geo points") {
  CHECK(dump_compact(to_geo_point(parse_json(R"({"lat":35.0,"lon":139.7})"))) ==
        R"({"type":"Point","coordinates":[139.7,35.0]})");
  CHECK(dump_compact(to_geo_point(parse_json(R"({"latitude":1,"longitude":2})"))) ==
        R"({"type":"Point","coordinates":[2.0,1.0]})");
  CHECK(code_of([] { to_geo_point(parse_json(R"({"x":1})")); }) == "InvalidArgument");
}

TEST_CASE("weather config") {
  const auto& r = weather_run();
  REQUIRE(r.config);
  CHECK(test::matches_golden("weather_config.json", dump_pretty(r.config->to_json())));
  const auto* root = r.config->rule_at("$");
  REQUIRE(root);
  CHECK(root->entity_type == "WeatherObserved");
  CHECK(root->id_template == "urn:ngsi-ld:WeatherObserved:{station}");
  REQUIRE(root->rule_for("temp"));
  CHECK(root->rule_for("temp")->target_name == "temperature");
  CHECK(root->rule_for("observed")->transform == Transform::DatetimeNormalize);
  CHECK(root->rule_for("pos")->transform == Transform::GeoPoint);
  CHECK(root->carry_over == std::vector<std::string>{"note"});
  REQUIRE(root->children.size() == 1);
  CHECK(root->children[0].source_concept == "device");
  CHECK(r.config->rule_at("$.device")->id_template == "urn:ngsi-ld:Device:{deviceId}");

  // compile is a pure function of the session
  CompileOptions opts;
  opts.provenance = r.config->provenance;
  CHECK(dump_compact(compile_config(r.session, r.schema, backbone(), opts).to_json()) ==
        dump_compact(r.config->to_json()));
  CHECK(TranslationConfig::from_json(r.config->to_json()).to_json() == r.config->to_json());
}

TEST_CASE("translating the weather samples") {
  const auto& cfg = *weather_run().config;
  const auto samples = weather();
  const auto es = translate(cfg, samples[0]);
  REQUIRE(es.size() == 2);
  const auto& w = es[0];
  CHECK(w.id.str() == "urn:ngsi-ld:WeatherObserved:S1");
  CHECK(attr(w, "temperature").value == 21.5);
  CHECK(attr(w, "stationId").value == "S1");
  CHECK(attr(w, "dateObserved").value == "2024-05-01T10:00:00Z");
  CHECK(dump_compact(attr(w, "location").value) == R"({"type":"Point","coordinates":[139.7,35.0]})");
  CHECK(attr(w, "device").kind == ngsild::AttributeKind::Relationship);
  CHECK(attr(w, "device").object->str() == "urn:ngsi-ld:Device:TX-100");
  CHECK(es[1].id.str() == "urn:ngsi-ld:Device:TX-100");
  CHECK(attr(es[1], "deviceId").value == "TX-100");

  // carried-over keys stay verbatim
  CHECK(attr(translate(cfg, samples[2])[0], "note").value == "roof mounted");

  // identical records give identical ids
  CHECK(translate(cfg, samples[0])[0].id == translate(cfg, samples[0])[0].id);
  CHECK(translate(cfg, samples[3])[1].id == es[1].id);

  // types exist in the target ontology
  const auto target = backbone();
  for (const auto& s : samples) {
    for (const auto& e : translate(cfg, s)) {
      for (const auto& t : e.types) CHECK(target.contains(t));
    }
  }
  CHECK(code_of([&] { translate(cfg, Json::array()); }) == "NonObjectSample");
}

TEST_CASE("mapped paths, children and carry-over cover every sample key") {
  const auto& r = weather_run();
  for (const auto& s : weather()) {
    std::function<void(const Json&, const std::string&)> cover = [&](const Json& obj, const std::string& path) {
      const auto* rule = r.config->rule_at(path);
      REQUIRE(rule);
      for (const auto& [key, value] : obj.items()) {
        const bool child = std::any_of(rule->children.begin(), rule->children.end(),
                                       [&](const ChildLink& c) { return c.source_key == key; });
        const bool carried = std::find(rule->carry_over.begin(), rule->carry_over.end(), key) != rule->carry_over.end();
        CHECK_MESSAGE((rule->rule_for(key) || child || carried), path << "." << key);
        if (child && value.is_object()) cover(value, path + "." + key);
      }
    };
    cover(s, "$");
  }
}

TEST_CASE("unmatched child objects become structured values") {
  const auto& r = weather_run();
  const auto cfg = compile_config(approved_session({{"weatherObserved", "WeatherObserved"}}), r.schema, backbone());
  REQUIRE(cfg.rules.size() == 1);
  const auto es = translate(cfg, weather()[0]);
  REQUIRE(es.size() == 1);
  const auto& dev = attr(es[0], "device");
  CHECK(dev.kind == ngsild::AttributeKind::Property);
  CHECK(dev.value == weather()[0]["device"]);
}

TEST_CASE("zero property overlap carries everything over") {
  const auto& r = weather_run();
  const auto target = onto::Ontology::parse(R"({"name":"t","concepts":[{"name":"Thing","properties":[{"name":"zzzz"}]}]})");
  const auto cfg = compile_config(approved_session({{"weatherObserved", "Thing"}}), r.schema, target);
  const auto& rule = cfg.rules.at(0);
  CHECK(rule.attribute_rules.empty());
  CHECK(rule.carry_over.size() == r.schema.find("weatherObserved")->properties.size());
  CHECK(rule.id_template == "urn:ngsi-ld:Thing:{hash}");
  const auto a = translate(cfg, weather()[0]);
  CHECK(a[0].id == translate(cfg, weather()[0])[0].id);
  CHECK(a[0].id != translate(cfg, weather()[1])[0].id);
}

TEST_CASE("relationships, reserved keys and id errors") {
  const std::vector<Json> samples = {parse_json(R"({"code":"S9","refDevice":"TX-1","type":"rain","temp":3})"),
                                     parse_json(R"({"refDevice":"urn:ngsi-ld:Device:abc","type":"snow","temp":1})")};
  const auto schema = schema::infer_from_samples(samples, "obs");
  CompileOptions strict;
  const auto cfg = compile_config(approved_session({{"obs", "WeatherObserved"}}), schema, backbone(), strict);
  const auto& rule = cfg.rules.at(0);
  CHECK(rule.rule_for("refDevice")->kind == ngsild::AttributeKind::Relationship);
  // no key carries an id token, so the content hash is used
  CHECK(rule.id_template == "urn:ngsi-ld:WeatherObserved:{hash}");
  const auto e = translate(cfg, samples[0])[0];
  CHECK(attr(e, "refDevice").object->str() == "urn:ngsi-ld:Device:TX-1");
  CHECK(attr(e, "source_type").value == "rain");
  CHECK(attr(translate(cfg, samples[1])[0], "refDevice").object->str() == "urn:ngsi-ld:Device:abc");

  const std::vector<Json> with_id = {parse_json(R"({"sensorId":"a","temp":1})"), parse_json(R"({"temp":2})")};
  const auto s2 = schema::infer_from_samples(with_id, "obs");
  const auto c2 = compile_config(approved_session({{"obs", "WeatherObserved"}}), s2, backbone());
  CHECK(c2.rules[0].id_template == "urn:ngsi-ld:WeatherObserved:{sensorId}");
  CHECK(code_of([&] { translate(c2, with_id[1]); }) == "MissingIdField");
  CompileOptions fallback;
  fallback.hash_fallback = true;
  const auto c3 = compile_config(approved_session({{"obs", "WeatherObserved"}}), s2, backbone(), fallback);
  CHECK(translate(c3, with_id[1])[0].id.str().rfind("urn:ngsi-ld:WeatherObserved:", 0) == 0);
}

TEST_CASE("compile errors and remapped pairs") {
  const auto& r = weather_run();
  auto pending = r.session;
  // reset to a session with nothing approved
  const auto fresh = review::ReviewSession::create(r.match.scores, r.match.matches, {});
  CHECK(code_of([&] { compile_config(fresh, r.schema, backbone()); }) == "NoApprovedPairs");
  CHECK(code_of([&] { compile_config(approved_session({{"ghost", "Device"}}), r.schema, backbone()); }) ==
        "UnknownConcept");

  auto s = review::ReviewSession::create(r.match.scores, r.match.matches, {});
  const std::string root_pair = onto::make_pair_id("weatherObserved", "WeatherObserved");
  REQUIRE(s.find(root_pair));
  s.decide({root_pair, review::Action::Remap, "AirQualityObserved"});
  const auto cfg = compile_config(s, r.schema, backbone());
  CHECK(cfg.rule_at("$")->entity_type == "AirQualityObserved");
}

TEST_CASE("config loading") {
  CHECK(code_of([] { TranslationConfig::load("/nonexistent/config.json"); }) == "ConfigNotFound");
  CHECK(code_of([] { TranslationConfig::from_json(parse_json(R"({"rules":[{"x":1}]})")); }) == "MalformedDocument");
  test::TempDir dir("cfg");
  io::write_file(dir / "c.json", dump_pretty(weather_run().config->to_json()));
  CHECK(TranslationConfig::load((dir / "c.json").string()).to_json() == weather_run().config->to_json());
}
