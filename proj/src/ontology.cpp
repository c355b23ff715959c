#include "vforge/ontology.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "vforge/error.hpp"

namespace vforge::onto {

const PropertyDef* Concept::property(std::string_view name) const {
  for (const auto& p : properties) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

void Ontology::add(Concept c) {
  if (c.name.empty()) fail("MalformedDocument", "concept with empty name");
  std::set<std::string> seen;
  for (const auto& p : c.properties) {
    if (p.name.empty()) fail("MalformedDocument", "concept '" + c.name + "' has an unnamed property");
    if (!seen.insert(p.name).second) {
      fail("DuplicateProperty", "concept '" + c.name + "' repeats property '" + p.name + "'");
    }
  }
  auto name = c.name;
  if (!concepts_.emplace(name, std::move(c)).second) {
    fail("DuplicateConcept", "concept '" + name + "' defined twice");
  }
}

void Ontology::validate() const {
  for (const auto& [name, c] : concepts_) {
    for (const auto& p : c.parents) {
      if (!concepts_.count(p)) {
        fail("DanglingParent", "concept '" + name + "' names unknown parent '" + p + "'");
      }
    }
  }
  enum class Mark { White, Grey, Black };
  std::map<std::string, Mark> mark;
  std::function<void(const std::string&)> visit = [&](const std::string& n) {
    mark[n] = Mark::Grey;
    for (const auto& p : concepts_.at(n).parents) {
      auto m = mark[p];
      if (m == Mark::Grey) fail("ParentCycle", "parent cycle through '" + n + "' and '" + p + "'");
      if (m == Mark::White) visit(p);
    }
    mark[n] = Mark::Black;
  };
  for (const auto& [name, c] : concepts_) {
    if (mark[name] == Mark::White) visit(name);
  }
}

namespace {

std::vector<std::string> string_list(const Json& doc, const char* key, const std::string& where) {
  std::vector<std::string> out;
  auto it = doc.find(key);
  if (it == doc.end()) return out;
  if (!it->is_array()) fail("MalformedDocument", where + ": '" + key + "' must be a list");
  for (const auto& v : *it) {
    if (!v.is_string()) fail("MalformedDocument", where + ": '" + key + "' entries must be text");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::optional<std::string> optional_text(const Json& doc, const char* key, const std::string& where) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) fail("MalformedDocument", where + ": '" + key + "' must be text");
  return it->get<std::string>();
}

}  // namespace

Ontology Ontology::from_json(const Json& doc) {
  if (!doc.is_object()) fail("MalformedDocument", "ontology document must be an object");
  if (!doc.contains("name") || !doc["name"].is_string()) {
    fail("MissingField", "ontology has no name");
  }
  Ontology ont(doc["name"].get<std::string>());
  auto concepts = doc.find("concepts");
  if (concepts == doc.end()) fail("MissingField", "ontology has no concepts list");
  if (!concepts->is_array()) fail("MalformedDocument", "concepts must be a list");
  for (const auto& cj : *concepts) {
    if (!cj.is_object() || !cj.contains("name") || !cj["name"].is_string()) {
      fail("MalformedDocument", "every concept needs a text name");
    }
    Concept c;
    c.name = cj["name"].get<std::string>();
    const std::string where = "concept '" + c.name + "'";
    c.iri = optional_text(cj, "iri", where);
    c.description = optional_text(cj, "description", where);
    for (auto& p : string_list(cj, "parents", where)) c.parents.insert(std::move(p));
    for (auto& s : string_list(cj, "synonyms", where)) c.synonyms.insert(std::move(s));
    if (auto props = cj.find("properties"); props != cj.end()) {
      if (!props->is_array()) fail("MalformedDocument", where + ": properties must be a list");
      for (const auto& pj : *props) {
        if (!pj.is_object() || !pj.contains("name") || !pj["name"].is_string()) {
          fail("MalformedDocument", where + ": property needs a text name");
        }
        PropertyDef p;
        p.name = pj["name"].get<std::string>();
        p.range = optional_text(pj, "range", where).value_or("Text");
        p.synonyms = string_list(pj, "synonyms", where + "." + p.name);
        c.properties.push_back(std::move(p));
      }
    }
    ont.add(std::move(c));
  }
  ont.validate();
  return ont;
}

Ontology Ontology::parse(std::string_view document) { return from_json(parse_json(document)); }

Json Ontology::to_json() const {
  Json concepts = Json::array();
  for (const auto& [name, c] : concepts_) {
    Json cj = Json::object();
    cj["name"] = c.name;
    if (c.iri) cj["iri"] = *c.iri;
    if (c.description) cj["description"] = *c.description;
    cj["parents"] = Json::array();
    for (const auto& p : c.parents) cj["parents"].push_back(p);
    cj["properties"] = Json::array();
    for (const auto& p : c.properties) {
      Json pj = {{"name", p.name}, {"range", p.range}};
      if (!p.synonyms.empty()) pj["synonyms"] = p.synonyms;
      cj["properties"].push_back(std::move(pj));
    }
    cj["synonyms"] = Json::array();
    for (const auto& s : c.synonyms) cj["synonyms"].push_back(s);
    concepts.push_back(std::move(cj));
  }
  Json doc = Json::object();
  doc["name"] = name_;
  doc["concepts"] = std::move(concepts);
  return doc;
}

const Concept* Ontology::find(std::string_view name) const {
  auto it = concepts_.find(std::string(name));
  return it == concepts_.end() ? nullptr : &it->second;
}

std::vector<std::string> Ontology::children(std::string_view name) const {
  std::vector<std::string> out;
  for (const auto& [n, c] : concepts_) {
    if (c.parents.count(std::string(name))) out.push_back(n);
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::vector<std::string> tokenize_name(std::string_view name) {
  auto is_upper = [](char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; };
  auto is_lower = [](char c) { return std::islower(static_cast<unsigned char>(c)) != 0; };
  auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  auto is_alnum = [&](char c) { return is_upper(c) || is_lower(c) || is_digit(c); };

  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(to_lower(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < name.size(); ++i) {
    char c = name[i];
    if (!is_alnum(c)) {
      flush();
      continue;
    }
    if (!cur.empty()) {
      char prev = cur.back();
      bool boundary = false;
      if (is_digit(c) != is_digit(prev)) {
        boundary = true;
      } else if (is_lower(prev) && is_upper(c)) {
        boundary = true;
      } else if (is_upper(prev) && is_upper(c) && i + 1 < name.size() && is_lower(name[i + 1])) {
        // Acronym run ends before the capital that starts the next word.
        boundary = true;
      }
      if (boundary) flush();
    }
    cur.push_back(c);
  }
  flush();
  return tokens;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
      diag = up;
    }
  }
  return row[b.size()];
}

double name_similarity(std::string_view a, std::string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  auto d = edit_distance(to_lower(a), to_lower(b));
  return 1.0 - static_cast<double>(d) / static_cast<double>(longest);
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() || b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

}  // namespace vforge::onto
