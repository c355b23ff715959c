#include "support.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "vforge/io.hpp"

namespace vforge::test {

namespace fs = std::filesystem;

TempDir::TempDir(std::string_view tag) {
  static std::uint64_t counter = 0;
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("vforge-" + std::string(tag) + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

bool oracle_topic_matches(const std::vector<std::string>& filter, std::size_t fi,
                          const std::vector<std::string>& topic, std::size_t ti) {
  if (fi == filter.size()) return ti == topic.size();
  if (filter[fi] == "#") return true;
  if (ti == topic.size()) return false;
  if (filter[fi] == "+" || filter[fi] == topic[ti]) return oracle_topic_matches(filter, fi + 1, topic, ti + 1);
  return false;
}

std::size_t oracle_edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
    }
  }
  return d[a.size()][b.size()];
}

namespace {

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

Json random_value(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> kind(0, depth > 0 ? 6 : 4);
  switch (kind(rng)) {
    case 0: return std::uniform_int_distribution<int>(-1000, 1000)(rng);
    case 1: return std::uniform_real_distribution<double>(-1e4, 1e4)(rng);
    case 2: return pick(rng, std::vector<std::string>{"on", "off", "ok", "", "2024-05-01T10:00:00Z", "ünïcode"});
    case 3: return std::bernoulli_distribution(0.5)(rng);
    case 4: return nullptr;
    case 5: {
      Json obj = Json::object();
      const int n = std::uniform_int_distribution<int>(0, 3)(rng);
      for (int i = 0; i < n; ++i) obj["k" + std::to_string(i)] = random_value(rng, depth - 1);
      return obj;
    }
    default: {
      Json arr = Json::array();
      const int n = std::uniform_int_distribution<int>(0, 3)(rng);
      for (int i = 0; i < n; ++i) arr.push_back(random_value(rng, depth - 1));
      return arr;
    }
  }
}

ngsild::Attribute random_attribute(std::mt19937_64& rng, int depth) {
  static const std::vector<std::string> kSubNames = {"accuracy", "source", "providedBy", "quality"};
  static const std::vector<std::string> kTimes = {"2024-05-01T10:00:00Z", "2024-05-01T12:00:00+02:00",
                                                  "2023-12-31T23:59:59.125Z"};
  ngsild::Attribute a;
  if (std::bernoulli_distribution(0.25)(rng)) {
    a = ngsild::Attribute::relationship(ngsild::EntityId::canonical(
        pick(rng, std::vector<std::string>{"PowerPole", "Device", "Street"}),
        std::to_string(std::uniform_int_distribution<int>(1, 99)(rng))));
  } else {
    a = ngsild::Attribute::property(random_value(rng, 2));
  }
  if (std::bernoulli_distribution(0.3)(rng)) a.observed_at = pick(rng, kTimes);
  if (std::bernoulli_distribution(0.3)(rng)) a.unit_code = pick(rng, std::vector<std::string>{"KMH", "CEL", "P1"});
  if (depth > 0) {
    const int n = std::uniform_int_distribution<int>(0, 2)(rng);
    for (int i = 0; i < n; ++i) a.sub_attributes.push_back({kSubNames[static_cast<std::size_t>(i)], random_attribute(rng, depth - 1)});
  }
  return a;
}

}  // namespace

ngsild::Entity random_entity(std::mt19937_64& rng, bool allow_sub_attributes) {
  static const std::vector<std::string> kTypes = {"Car", "Camera", "Building", "WeatherObserved", "Device"};
  static const std::vector<std::string> kNames = {"speed", "location", "temperature", "attachedTo",
                                                  "name", "status", "refDevice", "address"};
  ngsild::Entity e;
  const std::string type = pick(rng, kTypes);
  e.id = ngsild::EntityId::canonical(type, std::to_string(std::uniform_int_distribution<int>(1, 9999)(rng)));
  e.types.push_back(type);
  if (std::bernoulli_distribution(0.1)(rng)) e.types.push_back("Thing");
  std::vector<std::string> names = kNames;
  std::shuffle(names.begin(), names.end(), rng);
  const auto n = std::uniform_int_distribution<std::size_t>(0, names.size())(rng);
  for (std::size_t i = 0; i < n; ++i) {
    e.attributes.push_back({names[i], random_attribute(rng, allow_sub_attributes ? 1 : 0)});
  }
  return e;
}

std::vector<std::string> random_topic_segments(std::mt19937_64& rng) {
  const auto n = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(pick(rng, std::vector<std::string>{"a", "b", "c"}));
  return out;
}

std::vector<std::string> random_filter_segments(std::mt19937_64& rng) {
  const auto n = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool last = i + 1 == n;
    const int r = std::uniform_int_distribution<int>(0, last ? 5 : 4)(rng);
    if (r < 3) out.push_back(std::string(1, static_cast<char>('a' + r)));
    else if (r < 5) out.push_back("+");
    else out.push_back("#");
  }
  return out;
}

std::string read_text(const fs::path& p) { return io::read_file(p); }

fs::path golden_dir() { return fs::path(VFORGE_GOLDEN_DIR); }

bool matches_golden(const std::string& name, const std::string& actual) {
  const fs::path p = golden_dir() / name;
  if (const char* u = std::getenv("VFORGE_UPDATE_GOLDEN"); u && std::string(u) == "1") {
    io::write_file(p, actual);
    return true;
  }
  if (!fs::exists(p)) return false;
  return io::read_file(p) == actual;
}

ngsild::Entity car_entity() {
  return ngsild::parse_entity(R"({"id":"urn:ngsi-ld:Car:1","type":"Car","speed":{"type":"Property","value":55}})");
}

ngsild::Entity camera_entity() {
  return ngsild::parse_entity(
      R"({"id":"urn:ngsi-ld:Camera:c1","type":"Camera","attachedTo":{"type":"Relationship","object":"urn:ngsi-ld:PowerPole:p1"}})");
}

}  // namespace vforge::test
