#include "vforge/translation.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <regex>
#include <set>

#include "vforge/error.hpp"
#include "vforge/io.hpp"

namespace vforge::pipeline {

using ngsild::Attribute;
using ngsild::AttributeKind;
using ngsild::Entity;
using ngsild::EntityId;
using schema::TypeKind;

std::string_view transform_name(Transform t) {
  switch (t) {
    case Transform::Identity: return "identity";
    case Transform::DatetimeNormalize: return "datetime-normalize";
    case Transform::GeoPoint: return "geo-point";
  }
  return "";
}

Transform parse_transform(std::string_view s) {
  for (auto t : {Transform::Identity, Transform::DatetimeNormalize, Transform::GeoPoint}) {
    if (transform_name(t) == s) return t;
  }
  fail("MalformedDocument", "unknown transform '" + std::string(s) + "'");
}

const AttributeRule* TranslationRule::rule_for(std::string_view source_key) const {
  for (const auto& r : attribute_rules) {
    if (r.source_key == source_key) return &r;
  }
  return nullptr;
}

const TranslationRule* TranslationConfig::rule_at(std::string_view schema_path) const {
  for (const auto& r : rules) {
    if (std::find(r.source_paths.begin(), r.source_paths.end(), schema_path) != r.source_paths.end()) {
      return &r;
    }
  }
  return nullptr;
}

Json TranslationConfig::to_json() const {
  Json rules_json = Json::array();
  for (const auto& r : rules) {
    Json attrs = Json::array();
    for (const auto& a : r.attribute_rules) {
      attrs.push_back({{"sourceKey", a.source_key},
                       {"targetName", a.target_name},
                       {"kind", a.kind == AttributeKind::Property ? "Property" : "Relationship"},
                       {"transform", transform_name(a.transform)},
                       {"range", a.range}});
    }
    Json children = Json::array();
    for (const auto& c : r.children) {
      children.push_back({{"sourceKey", c.source_key}, {"sourceConcept", c.source_concept}, {"array", c.array}});
    }
    rules_json.push_back({{"sourceConcept", r.source_concept},
                          {"sourcePaths", r.source_paths},
                          {"entityType", r.entity_type},
                          {"idTemplate", r.id_template},
                          {"hashFallback", r.hash_fallback},
                          {"attributeRules", std::move(attrs)},
                          {"children", std::move(children)},
                          {"carryOver", r.carry_over}});
  }
  return {{"version", version},
          {"provenance",
           {{"sessionId", provenance.session_id},
            {"sourceOntology", provenance.source_ontology},
            {"targetOntology", provenance.target_ontology},
            {"labelModelHash", provenance.label_model_hash},
            {"classifierHash", provenance.classifier_hash},
            {"createdAt", provenance.created_at}}},
          {"rules", std::move(rules_json)}};
}

TranslationConfig TranslationConfig::from_json(const Json& doc) {
  try {
    TranslationConfig c;
    c.version = doc.value("version", 1);
    if (doc.contains("provenance")) {
      const auto& p = doc["provenance"];
      c.provenance.session_id = p.value("sessionId", "");
      c.provenance.source_ontology = p.value("sourceOntology", "");
      c.provenance.target_ontology = p.value("targetOntology", "");
      c.provenance.label_model_hash = p.value("labelModelHash", "");
      c.provenance.classifier_hash = p.value("classifierHash", "");
      c.provenance.created_at = p.value("createdAt", "");
    }
    for (const auto& rj : doc.at("rules")) {
      TranslationRule r;
      r.source_concept = rj.at("sourceConcept").get<std::string>();
      r.source_paths = rj.at("sourcePaths").get<std::vector<std::string>>();
      r.entity_type = rj.at("entityType").get<std::string>();
      r.id_template = rj.at("idTemplate").get<std::string>();
      r.hash_fallback = rj.value("hashFallback", false);
      for (const auto& aj : rj.at("attributeRules")) {
        AttributeRule a;
        a.source_key = aj.at("sourceKey").get<std::string>();
        a.target_name = aj.at("targetName").get<std::string>();
        a.kind = aj.at("kind") == "Relationship" ? AttributeKind::Relationship : AttributeKind::Property;
        a.transform = parse_transform(aj.value("transform", "identity"));
        a.range = aj.value("range", "");
        r.attribute_rules.push_back(std::move(a));
      }
      for (const auto& cj : rj.value("children", Json::array())) {
        r.children.push_back({cj.at("sourceKey").get<std::string>(),
                              cj.at("sourceConcept").get<std::string>(), cj.value("array", false)});
      }
      r.carry_over = rj.value("carryOver", std::vector<std::string>{});
      c.rules.push_back(std::move(r));
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail("MalformedDocument", std::string("translation config: ") + e.what());
  }
}

TranslationConfig TranslationConfig::load(const std::string& path) {
  return from_json(parse_json(io::read_file(path, "ConfigNotFound")));
}

namespace {

struct TargetProperty {
  std::string name;
  std::string range;
  std::vector<std::string> labels;  // name plus synonyms
};

// Own properties first, then inherited ones not shadowed, ancestors in name order.
std::vector<TargetProperty> target_properties(const onto::Ontology& ont, const onto::Concept& c) {
  std::vector<TargetProperty> out;
  std::set<std::string> seen;
  std::set<std::string> visited;
  std::vector<const onto::Concept*> queue{&c};
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const auto* cur = queue[i];
    if (!visited.insert(cur->name).second) continue;
    for (const auto& p : cur->properties) {
      if (!seen.insert(p.name).second) continue;
      TargetProperty tp{p.name, p.range, {p.name}};
      tp.labels.insert(tp.labels.end(), p.synonyms.begin(), p.synonyms.end());
      out.push_back(std::move(tp));
    }
    for (const auto& parent : cur->parents) {
      if (const auto* pc = ont.find(parent)) queue.push_back(pc);
    }
  }
  return out;
}

bool has_id_token(std::string_view name) {
  const auto tokens = onto::tokenize_name(name);
  return std::find(tokens.begin(), tokens.end(), "id") != tokens.end();
}

bool is_child_object(const schema::InferredType& t) { return t.kind == TypeKind::Object; }

bool is_child_array(const schema::InferredType& t) {
  return t.kind == TypeKind::Array && t.items && t.items->kind == TypeKind::Object;
}

}  // namespace

TranslationConfig compile_config(const review::ReviewSession& session, const schema::SourceSchema& schema,
                                 const onto::Ontology& target, const CompileOptions& options) {
  std::map<std::string, std::string> approved;  // source concept -> target concept
  for (const auto& c : session.approved()) approved[c.src] = c.tgt;
  if (approved.empty()) fail("NoApprovedPairs", "session " + session.id() + " has no approved pairs");

  TranslationConfig config;
  config.provenance = options.provenance;
  if (config.provenance.session_id.empty()) config.provenance.session_id = session.id();
  if (config.provenance.source_ontology.empty()) config.provenance.source_ontology = schema.root;
  if (config.provenance.target_ontology.empty()) config.provenance.target_ontology = target.name();

  for (const auto& [src, tgt] : approved) {
    if (!schema.find(src)) fail("UnknownConcept", "approved source concept " + src + " is not in the schema");
    if (!target.find(tgt)) fail("UnknownConcept", "approved target concept " + tgt + " is not in the ontology");
  }

  // Schema order keeps rule order independent of approval order.
  for (const auto& sc : schema.concepts) {
    auto it = approved.find(sc.name);
    if (it == approved.end()) continue;
    const onto::Concept& tc = *target.find(it->second);

    TranslationRule rule;
    rule.source_concept = sc.name;
    rule.source_paths = sc.paths;
    rule.entity_type = tc.name;
    rule.hash_fallback = options.hash_fallback;

    std::vector<const schema::SourceProperty*> matchable;
    for (const auto& p : sc.properties) {
      const bool child_obj = is_child_object(p.type) && approved.count(p.type.concept_ref);
      const bool child_arr = is_child_array(p.type) && approved.count(p.type.items->concept_ref);
      if (child_obj) {
        rule.children.push_back({p.key, p.type.concept_ref, false});
      } else if (child_arr) {
        rule.children.push_back({p.key, p.type.items->concept_ref, true});
      } else if (is_child_object(p.type) || is_child_array(p.type)) {
        // Unmatched nested concept: kept whole as a structured value.
        rule.carry_over.push_back(p.key);
      } else {
        matchable.push_back(&p);
      }
    }

    const auto props = target_properties(target, tc);
    struct Scored {
      double sim;
      std::size_t src;
      std::size_t tgt;
    };
    std::vector<Scored> pairs;
    for (std::size_t i = 0; i < matchable.size(); ++i) {
      for (std::size_t j = 0; j < props.size(); ++j) {
        double best = 0.0;
        for (const auto& label : props[j].labels) {
          best = std::max(best, onto::name_similarity(matchable[i]->key, label));
        }
        if (best >= options.property_threshold) pairs.push_back({best, i, j});
      }
    }
    std::sort(pairs.begin(), pairs.end(), [&](const Scored& a, const Scored& b) {
      if (a.sim != b.sim) return a.sim > b.sim;
      if (matchable[a.src]->key != matchable[b.src]->key) return matchable[a.src]->key < matchable[b.src]->key;
      return props[a.tgt].name < props[b.tgt].name;
    });
    std::vector<int> src_to_tgt(matchable.size(), -1);
    std::vector<bool> tgt_used(props.size(), false);
    for (const auto& p : pairs) {
      if (src_to_tgt[p.src] >= 0 || tgt_used[p.tgt]) continue;
      src_to_tgt[p.src] = static_cast<int>(p.tgt);
      tgt_used[p.tgt] = true;
    }

    std::optional<std::string> id_key;
    for (std::size_t i = 0; i < matchable.size(); ++i) {
      const auto& sp = *matchable[i];
      if (src_to_tgt[i] < 0) {
        rule.carry_over.push_back(sp.key);
      } else {
        const auto& tp = props[static_cast<std::size_t>(src_to_tgt[i])];
        AttributeRule ar;
        ar.source_key = sp.key;
        ar.target_name = tp.name;
        ar.range = tp.range;
        if (target.contains(tp.range)) {
          ar.kind = AttributeKind::Relationship;
        } else if (sp.type.kind == TypeKind::Datetime) {
          ar.transform = Transform::DatetimeNormalize;
        } else if (sp.type.kind == TypeKind::Geo) {
          ar.transform = Transform::GeoPoint;
        }
        rule.attribute_rules.push_back(std::move(ar));
      }
      const bool scalar = sp.type.kind != TypeKind::Object && sp.type.kind != TypeKind::Array &&
                          sp.type.kind != TypeKind::Geo;
      if (!id_key && scalar) {
        const bool target_id = src_to_tgt[i] >= 0 && has_id_token(props[static_cast<std::size_t>(src_to_tgt[i])].name);
        if (has_id_token(sp.key) || target_id) id_key = sp.key;
      }
    }
    std::sort(rule.carry_over.begin(), rule.carry_over.end());  // schema key order
    rule.id_template = "urn:ngsi-ld:" + tc.name + ":{" + (id_key ? *id_key : std::string("hash")) + "}";
    config.rules.push_back(std::move(rule));
  }
  return config;
}

namespace {

std::string carried_name(const std::string& key) {
  if (key == "id" || key == "type" || ngsild::is_reserved_entity_key(key)) {
    return "source_" + (key.front() == '@' ? key.substr(1) : key);
  }
  return key;
}

std::string scalar_text(const Json& v) {
  return v.is_string() ? v.get<std::string>() : dump_compact(v);
}

std::string make_id(const TranslationRule& rule, const Json& record) {
  const auto open = rule.id_template.find('{');
  const auto close = rule.id_template.find('}', open);
  if (open == std::string::npos || close == std::string::npos) return rule.id_template;
  const std::string field = rule.id_template.substr(open + 1, close - open - 1);
  std::string value;
  if (field == "hash") {
    value = hex64(fnv1a64(dump_compact(record)));
  } else if (record.contains(field) && !record[field].is_null()) {
    value = scalar_text(record[field]);
  } else if (rule.hash_fallback) {
    value = hex64(fnv1a64(dump_compact(record)));
  } else {
    fail("MissingIdField", "record lacks id field '" + field + "' for " + rule.entity_type);
  }
  return rule.id_template.substr(0, open) + value + rule.id_template.substr(close + 1);
}

Attribute apply_rule(const AttributeRule& r, const Json& value) {
  if (r.kind == AttributeKind::Relationship) {
    std::string text = scalar_text(value);
    if (text.find(':') != std::string::npos) return Attribute::relationship(EntityId(text));
    return Attribute::relationship(EntityId::canonical(r.range, text));
  }
  switch (r.transform) {
    case Transform::DatetimeNormalize:
      if (value.is_string()) return Attribute::property(normalize_datetime(value.get<std::string>()));
      break;
    case Transform::GeoPoint:
      if (value.is_object()) return Attribute::property(to_geo_point(value));
      break;
    case Transform::Identity: break;
  }
  return Attribute::property(value);
}

void put(Entity& e, std::string name, Attribute a) {
  while (e.find(name)) name = "source_" + name;
  e.attributes.push_back({std::move(name), std::move(a)});
}

struct Translator {
  const TranslationConfig& config;
  std::vector<Entity>& out;

  std::optional<EntityId> emit(const Json& record, const std::string& path) {
    const TranslationRule* rule = config.rule_at(path);
    if (!rule) {
      // Unmatched concept: no entity of its own, but matched descendants still translate.
      for (const auto& [key, value] : record.items()) descend(key, value, path);
      return std::nullopt;
    }
    Entity e;
    e.id = EntityId(make_id(*rule, record));
    e.types.push_back(rule->entity_type);
    const std::size_t slot = out.size();
    out.push_back(e);

    for (const auto& [key, value] : record.items()) {
      if (value.is_null()) continue;
      const auto child = std::find_if(rule->children.begin(), rule->children.end(),
                                      [&](const ChildLink& c) { return c.source_key == key; });
      if (child != rule->children.end()) {
        if (child->array && value.is_array()) {
          for (std::size_t i = 0; i < value.size(); ++i) {
            if (!value[i].is_object()) continue;
            if (auto id = emit(value[i], path + "." + key + "[]")) {
              put(e, key + "_" + std::to_string(i), Attribute::relationship(*id));
            }
          }
          continue;
        }
        if (!child->array && value.is_object()) {
          if (auto id = emit(value, path + "." + key)) put(e, key, Attribute::relationship(*id));
          continue;
        }
      }
      if (const auto* ar = rule->rule_for(key)) {
        put(e, ar->target_name, apply_rule(*ar, value));
      } else {
        put(e, carried_name(key), Attribute::property(value));
      }
    }
    out[slot] = std::move(e);
    return out[slot].id;
  }

  void descend(const std::string& key, const Json& value, const std::string& path) {
    if (value.is_object()) {
      if (config.rule_at(path + "." + key)) emit(value, path + "." + key);
    } else if (value.is_array()) {
      for (const auto& item : value) {
        if (item.is_object() && config.rule_at(path + "." + key + "[]")) emit(item, path + "." + key + "[]");
      }
    }
  }
};

}  // namespace

std::vector<Entity> translate(const TranslationConfig& config, const Json& sample) {
  if (!sample.is_object()) fail("NonObjectSample", "sample is not an object");
  std::vector<Entity> out;
  Translator{config, out}.emit(sample, "$");
  return out;
}

std::string normalize_datetime(std::string_view text) {
  static const std::regex re(
      R"(^(\d{4})-(\d{2})-(\d{2})(?:[T ](\d{2}):(\d{2})(?::(\d{2})(\.\d+)?)?)?(Z|[+-]\d{2}:?\d{2})?$)");
  std::cmatch m;
  if (!std::regex_match(text.begin(), text.end(), m, re)) {
    fail("InvalidArgument", "not an ISO-8601 date: '" + std::string(text) + "'");
  }
  using namespace std::chrono;
  auto num = [&](int i) { return m[i].matched ? std::stoi(m[i].str()) : 0; };
  const year_month_day ymd{year{num(1)}, month{static_cast<unsigned>(num(2))},
                           day{static_cast<unsigned>(num(3))}};
  if (!ymd.ok()) fail("InvalidArgument", "invalid calendar date: '" + std::string(text) + "'");
  sys_seconds t = sys_days{ymd} + hours{num(4)} + minutes{num(5)} + seconds{num(6)};
  if (m[8].matched && m[8].str() != "Z") {
    std::string z = m[8].str();
    z.erase(std::remove(z.begin(), z.end(), ':'), z.end());
    const int sign = z[0] == '-' ? -1 : 1;
    const int off = std::stoi(z.substr(1, 2)) * 60 + std::stoi(z.substr(3, 2));
    t -= minutes{sign * off};
  }
  const auto dp = floor<days>(t);
  const year_month_day d{dp};
  const hh_mm_ss hms{t - dp};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return std::string(buf) + (m[7].matched ? m[7].str() : "") + "Z";
}

Json to_geo_point(const Json& value) {
  double lat = 0.0;
  double lon = 0.0;
  if (value.contains("lat") && value.contains("lon")) {
    lat = value["lat"].get<double>();
    lon = value["lon"].get<double>();
  } else if (value.contains("latitude") && value.contains("longitude")) {
    lat = value["latitude"].get<double>();
    lon = value["longitude"].get<double>();
  } else {
    fail("InvalidArgument", "geo value needs lat/lon or latitude/longitude");
  }
  return {{"type", "Point"}, {"coordinates", {lon, lat}}};
}

}  // namespace vforge::pipeline
