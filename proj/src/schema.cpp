#include "vforge/schema.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <regex>
#include <set>

#include "vforge/error.hpp"

namespace vforge::schema {

namespace {

const char* kind_name(TypeKind k) {
  switch (k) {
    case TypeKind::Unknown: return "unknown";
    case TypeKind::Null: return "null";
    case TypeKind::Boolean: return "boolean";
    case TypeKind::Integer: return "integer";
    case TypeKind::Number: return "number";
    case TypeKind::Datetime: return "datetime";
    case TypeKind::Text: return "text";
    case TypeKind::Geo: return "geo";
    case TypeKind::Array: return "array";
    case TypeKind::Object: return "object";
  }
  return "unknown";
}

TypeKind kind_from_name(const std::string& s) {
  for (auto k : {TypeKind::Unknown, TypeKind::Null, TypeKind::Boolean, TypeKind::Integer,
                 TypeKind::Number, TypeKind::Datetime, TypeKind::Text, TypeKind::Geo,
                 TypeKind::Array, TypeKind::Object}) {
    if (s == kind_name(k)) return k;
  }
  fail("MalformedDocument", "unknown type kind '" + s + "'");
}

}  // namespace

InferredType InferredType::of(TypeKind kind, bool optional) {
  InferredType t;
  t.kind = kind;
  t.optional = optional;
  return t;
}

InferredType InferredType::array(InferredType items, bool optional) {
  InferredType t = of(TypeKind::Array, optional);
  t.items = std::make_shared<const InferredType>(std::move(items));
  return t;
}

InferredType InferredType::object(std::string concept_ref, bool optional) {
  InferredType t = of(TypeKind::Object, optional);
  t.concept_ref = std::move(concept_ref);
  return t;
}

bool operator==(const InferredType& a, const InferredType& b) {
  if (a.kind != b.kind || a.optional != b.optional) return false;
  if (a.kind == TypeKind::Array) return *a.items == *b.items;
  if (a.kind == TypeKind::Object) return a.concept_ref == b.concept_ref;
  return true;
}

std::string InferredType::str() const {
  std::string s = kind_name(kind);
  if (kind == TypeKind::Array) s += "<" + items->str() + ">";
  if (kind == TypeKind::Object) s += "<" + concept_ref + ">";
  if (optional) s += "?";
  return s;
}

Json InferredType::to_json() const {
  Json j = Json::object();
  j["kind"] = kind_name(kind);
  if (kind == TypeKind::Array) j["items"] = items->to_json();
  if (kind == TypeKind::Object) j["concept"] = concept_ref;
  if (optional) j["optional"] = true;
  return j;
}

InferredType InferredType::from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("kind")) fail("MalformedDocument", "type needs a kind");
  InferredType t = of(kind_from_name(doc["kind"].get<std::string>()), doc.value("optional", false));
  if (t.kind == TypeKind::Array) {
    if (!doc.contains("items")) fail("MalformedDocument", "array type needs items");
    t.items = std::make_shared<const InferredType>(from_json(doc["items"]));
  }
  if (t.kind == TypeKind::Object) t.concept_ref = doc.value("concept", "");
  return t;
}

InferredType unify_types(const InferredType& a, const InferredType& b) {
  if (a.kind == TypeKind::Unknown) {
    InferredType r = b;
    r.optional = a.optional || b.optional;
    return r;
  }
  if (b.kind == TypeKind::Unknown) return unify_types(b, a);
  if (a.kind == TypeKind::Null && b.kind == TypeKind::Null) {
    return InferredType::of(TypeKind::Null, a.optional || b.optional);
  }
  if (a.kind == TypeKind::Null) {
    InferredType r = b;
    r.optional = true;
    return r;
  }
  if (b.kind == TypeKind::Null) return unify_types(b, a);

  const bool opt = a.optional || b.optional;
  auto is = [&](TypeKind x, TypeKind y) {
    return (a.kind == x && b.kind == y) || (a.kind == y && b.kind == x);
  };

  if (a.kind == b.kind) {
    switch (a.kind) {
      case TypeKind::Array: return InferredType::array(unify_types(*a.items, *b.items), opt);
      case TypeKind::Object:
        if (a.concept_ref == b.concept_ref) return InferredType::object(a.concept_ref, opt);
        return InferredType::of(TypeKind::Text, opt);
      default: return InferredType::of(a.kind, opt);
    }
  }
  if (is(TypeKind::Integer, TypeKind::Number)) return InferredType::of(TypeKind::Number, opt);
  if (is(TypeKind::Geo, TypeKind::Object)) {
    return InferredType::object(a.kind == TypeKind::Object ? a.concept_ref : b.concept_ref, opt);
  }
  return InferredType::of(TypeKind::Text, opt);
}

bool looks_like_datetime(std::string_view text) {
  static const std::regex re(
      R"(^\d{4}-\d{2}-\d{2}([T ]\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}:?\d{2})?)?$)");
  return std::regex_match(text.begin(), text.end(), re);
}

bool looks_like_geo(const Json& value) {
  if (!value.is_object() || value.size() != 2) return false;
  auto numeric = [&](const char* k) { return value.contains(k) && value[k].is_number(); };
  return (numeric("lat") && numeric("lon")) || (numeric("latitude") && numeric("longitude"));
}

InferredType scalar_type_of(const Json& value) {
  if (value.is_null()) return InferredType::of(TypeKind::Null);
  if (value.is_boolean()) return InferredType::of(TypeKind::Boolean);
  if (value.is_number_integer()) return InferredType::of(TypeKind::Integer);
  if (value.is_number()) return InferredType::of(TypeKind::Number);
  if (value.is_string()) {
    return InferredType::of(looks_like_datetime(value.get_ref<const std::string&>())
                                ? TypeKind::Datetime
                                : TypeKind::Text);
  }
  fail("InternalError", "scalar_type_of called on a container");
}

const SourceProperty* SourceConcept::find(std::string_view key) const {
  for (const auto& p : properties) {
    if (p.key == key) return &p;
  }
  return nullptr;
}

const SourceConcept* SourceSchema::find(std::string_view name) const {
  for (const auto& c : concepts) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const SourceConcept* SourceSchema::concept_at(std::string_view path) const {
  for (const auto& c : concepts) {
    if (std::find(c.paths.begin(), c.paths.end(), path) != c.paths.end()) return &c;
  }
  return nullptr;
}

namespace {

// Per-path accumulation of everything observed. Keys are kept in sorted maps
// so the result does not depend on sample order.
struct Field;

struct Shape {
  std::size_t instances = 0;
  std::map<std::string, std::unique_ptr<Field>> fields;
};

struct Field {
  std::size_t presence = 0;
  InferredType scalar;  // join of scalar observations
  std::size_t geo_objects = 0;
  std::size_t plain_objects = 0;
  std::unique_ptr<Shape> object;
  bool saw_array = false;
  std::unique_ptr<Field> element;
  std::vector<Json> samples;
};

void observe_object(Shape& shape, const Json& obj, bool detect_geo);

void observe_value(Field& f, const Json& v, bool detect_geo) {
  if (v.is_object()) {
    if (detect_geo && looks_like_geo(v)) {
      ++f.geo_objects;
      if (f.samples.size() < kMaxSamples) f.samples.push_back(v);
    } else {
      ++f.plain_objects;
    }
    if (!f.object) f.object = std::make_unique<Shape>();
    observe_object(*f.object, v, detect_geo);
  } else if (v.is_array()) {
    f.saw_array = true;
    if (!f.element) f.element = std::make_unique<Field>();
    for (const auto& el : v) observe_value(*f.element, el, detect_geo);
    if (f.samples.size() < kMaxSamples) {
      bool scalar_items = std::none_of(v.begin(), v.end(),
                                       [](const Json& x) { return x.is_object(); });
      if (scalar_items) f.samples.push_back(v);
    }
  } else {
    f.scalar = unify_types(f.scalar, scalar_type_of(v));
    if (f.samples.size() < kMaxSamples) f.samples.push_back(v);
  }
}

void observe_object(Shape& shape, const Json& obj, bool detect_geo) {
  ++shape.instances;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    auto& slot = shape.fields[it.key()];
    if (!slot) slot = std::make_unique<Field>();
    ++slot->presence;
    observe_value(*slot, it.value(), detect_geo);
  }
}

bool is_object_field(const Field& f, bool detect_geo) {
  return f.object && (f.plain_objects > 0 || !detect_geo);
}

std::set<std::string> key_set(const Shape& s) {
  std::set<std::string> out;
  for (const auto& [k, _] : s.fields) out.insert(k);
  return out;
}

struct Occurrence {
  std::string path;
  std::string key;
  const Shape* shape;
  std::string parent_concept;
};

class Builder {
public:
  Builder(std::string root, bool detect_geo) : root_(std::move(root)), detect_geo_(detect_geo) {}

  SourceSchema build(const Shape& root_shape) {
    name_paths(root_shape);
    SourceSchema schema;
    schema.root = root_;
    schema.geo_detection = detect_geo_;
    for (const auto& name : order_) {
      SourceConcept c;
      c.name = name;
      c.parent = parent_[name];
      std::map<std::string, SourceProperty> props;
      for (const auto& occ : groups_[name]) {
        c.paths.push_back(occ.path);
        c.instances += occ.shape->instances;
        for (const auto& [key, field] : occ.shape->fields) {
          auto& p = props[key];
          p.key = key;
          p.presence += field->presence;
          p.type = unify_types(p.type, finalize(*field, occ.path + "." + key));
          for (const auto& s : field->samples) {
            if (p.samples.size() < kMaxSamples) p.samples.push_back(s);
          }
        }
      }
      for (auto& [_, p] : props) c.properties.push_back(std::move(p));
      schema.concepts.push_back(std::move(c));
    }
    return schema;
  }

private:
  // Breadth-first naming: same key with the same key set shares a concept,
  // a different key set under an already-used name gets a numeric suffix.
  void name_paths(const Shape& root_shape) {
    std::deque<Occurrence> queue;
    queue.push_back({"$", root_, &root_shape, ""});
    while (!queue.empty()) {
      Occurrence occ = queue.front();
      queue.pop_front();
      std::string name = occ.path == "$" ? root_ : assign_name(occ);
      path_concept_[occ.path] = name;
      if (!groups_.count(name)) {
        order_.push_back(name);
        parent_[name] = occ.parent_concept.empty() ? std::nullopt
                                                   : std::optional<std::string>(occ.parent_concept);
      }
      groups_[name].push_back(occ);
      for (const auto& [key, field] : occ.shape->fields) {
        if (is_object_field(*field, detect_geo_)) {
          queue.push_back({occ.path + "." + key, key, field->object.get(), name});
        }
        if (field->saw_array && field->element && is_object_field(*field->element, detect_geo_)) {
          queue.push_back({occ.path + "." + key + "[]", key, field->element->object.get(), name});
        }
      }
    }
  }

  std::string assign_name(const Occurrence& occ) {
    auto keys = key_set(*occ.shape);
    for (int n = 1;; ++n) {
      std::string candidate = n == 1 ? occ.key : occ.key + "_" + std::to_string(n);
      auto it = signature_.find(candidate);
      if (it == signature_.end()) {
        if (candidate == root_) continue;
        signature_[candidate] = keys;
        return candidate;
      }
      if (it->second == keys) return candidate;
    }
  }

  InferredType finalize(const Field& f, const std::string& path) const {
    InferredType t = f.scalar;
    if (f.object) {
      if (is_object_field(f, detect_geo_)) {
        t = unify_types(t, InferredType::object(path_concept_.at(path)));
      } else {
        t = unify_types(t, InferredType::of(TypeKind::Geo));
      }
    }
    if (f.saw_array) {
      InferredType items = f.element ? finalize(*f.element, path + "[]") : InferredType{};
      t = unify_types(t, InferredType::array(std::move(items)));
    }
    return t;
  }

  std::string root_;
  bool detect_geo_;
  std::vector<std::string> order_;
  std::map<std::string, std::vector<Occurrence>> groups_;
  std::map<std::string, std::optional<std::string>> parent_;
  std::map<std::string, std::set<std::string>> signature_;
  std::map<std::string, std::string> path_concept_;
};

}  // namespace

SourceSchema infer_from_samples(const std::vector<Json>& samples, std::string_view root_name,
                                InferOptions options) {
  if (samples.empty()) fail("EmptyInput", "no samples to infer a schema from");
  if (root_name.empty()) fail("InvalidArgument", "root concept name is empty");
  Shape root;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].is_object()) {
      fail("NonObjectSample", "sample " + std::to_string(i) + " is not a key-value document");
    }
    observe_object(root, samples[i], options.detect_geo);
  }
  return Builder(std::string(root_name), options.detect_geo).build(root);
}

Json SourceSchema::to_json() const {
  Json j = Json::object();
  j["root"] = root;
  j["geoDetection"] = geo_detection;
  j["concepts"] = Json::array();
  for (const auto& c : concepts) {
    Json cj = Json::object();
    cj["name"] = c.name;
    if (c.parent) cj["parent"] = *c.parent;
    cj["instances"] = c.instances;
    cj["paths"] = c.paths;
    cj["properties"] = Json::array();
    for (const auto& p : c.properties) {
      cj["properties"].push_back({{"key", p.key},
                                  {"type", p.type.to_json()},
                                  {"presence", p.presence},
                                  {"samples", p.samples}});
    }
    j["concepts"].push_back(std::move(cj));
  }
  return j;
}

SourceSchema SourceSchema::from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("root") || !doc.contains("concepts")) {
    fail("MalformedDocument", "schema document needs root and concepts");
  }
  SourceSchema s;
  s.root = doc["root"].get<std::string>();
  s.geo_detection = doc.value("geoDetection", true);
  for (const auto& cj : doc["concepts"]) {
    SourceConcept c;
    c.name = cj.at("name").get<std::string>();
    if (cj.contains("parent")) c.parent = cj["parent"].get<std::string>();
    c.instances = cj.value("instances", std::size_t{0});
    if (cj.contains("paths")) c.paths = cj["paths"].get<std::vector<std::string>>();
    for (const auto& pj : cj.value("properties", Json::array())) {
      SourceProperty p;
      p.key = pj.at("key").get<std::string>();
      p.type = InferredType::from_json(pj.at("type"));
      p.presence = pj.value("presence", std::size_t{0});
      for (const auto& v : pj.value("samples", Json::array())) p.samples.push_back(v);
      c.properties.push_back(std::move(p));
    }
    s.concepts.push_back(std::move(c));
  }
  if (!s.find(s.root)) fail("MalformedDocument", "schema root concept is missing");
  return s;
}

std::string range_of(const InferredType& t) {
  switch (t.kind) {
    case TypeKind::Boolean: return "Boolean";
    case TypeKind::Integer: return "Integer";
    case TypeKind::Number: return "Number";
    case TypeKind::Datetime: return "DateTime";
    case TypeKind::Geo: return "GeoProperty";
    case TypeKind::Array: return range_of(*t.items);
    case TypeKind::Object: return t.concept_ref;
    default: return "Text";
  }
}

onto::Ontology schema_to_ontology(const SourceSchema& s) {
  onto::Ontology ont(s.root);
  for (const auto& sc : s.concepts) {
    onto::Concept c;
    c.name = sc.name;
    if (sc.parent) c.parents.insert(*sc.parent);
    for (const auto& p : sc.properties) c.properties.push_back({p.key, range_of(p.type), {}});
    ont.add(std::move(c));
  }
  ont.validate();
  return ont;
}

}  // namespace vforge::schema
