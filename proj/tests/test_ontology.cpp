#include <algorithm>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "vforge/candidates.hpp"
#include "vforge/error.hpp"
#include "vforge/fixtures.hpp"
#include "vforge/knowledge.hpp"
#include "vforge/reference.hpp"
#include "vforge/synthetic.hpp"

using namespace vforge;
using namespace vforge::onto;

namespace {

std::string error_code(std::string_view doc) {
  try {
    Ontology::parse(doc);
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

std::string random_word(std::mt19937_64& rng) {
  static const std::string alphabet = "abcAB_1";
  std::string s;
  for (auto n = rng() % 9; n > 0; --n) s.push_back(alphabet[rng() % alphabet.size()]);
  return s;
}

Ontology small_target() {
  return Ontology::parse(R"({"name":"t","concepts":[
    {"name":"Device","iri":"urn:x:Device","description":"a sensing device","properties":[
      {"name":"serialNumber"},{"name":"modelName"},{"name":"batteryLevel"}]},
    {"name":"Thermometer","parents":["Device"],"synonyms":["ThermoSensor"]},
    {"name":"Vehicle","properties":[{"name":"speed"},{"name":"heading"},{"name":"plate"}]}]})");
}

Ontology small_source() {
  return Ontology::parse(R"({"name":"s","concepts":[
    {"name":"device","iri":"urn:x:Device","description":"device that senses","properties":[
      {"name":"serial_number"},{"name":"model_name"},{"name":"firmware"}]},
    {"name":"thermoSensor","parents":["device"]},
    {"name":"car","properties":[{"name":"a"},{"name":"b"},{"name":"c"}]}]})");
}

Label vote_of(const std::vector<KnowledgeFunction>& kfs, std::string_view id, const ConceptProfile& s,
              const ConceptProfile& t) {
  const auto f = extract_features(s, t);
  for (const auto& kf : kfs) {
    if (kf.id == id) return kf.vote({s, t, f});
  }
  FAIL("no such knowledge function");
  return Label::Abstain;
}

}  // namespace

TEST_CASE("identifier tokenization") {
  using V = std::vector<std::string>;
  CHECK(tokenize_name("GPSPosition2") == V{"gps", "position", "2"});
  CHECK(tokenize_name("dateObserved") == V{"date", "observed"});
  CHECK(tokenize_name("date_observed") == V{"date", "observed"});
  CHECK(tokenize_name("DateObserved") == V{"date", "observed"});
  CHECK(tokenize_name("HTTPServerError") == V{"http", "server", "error"});
  CHECK(tokenize_name("pm2_5") == V{"pm", "2", "5"});
  CHECK(tokenize_name("a-b c") == V{"a", "b", "c"});
  CHECK(tokenize_name("").empty());
  CHECK(tokenize_name("__").empty());
}

TEST_CASE("edit distance agrees with the full-table oracle") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_word(rng);
    const auto b = random_word(rng);
    const auto d = edit_distance(a, b);
    CHECK(d == test::oracle_edit_distance(a, b));
    CHECK(d == edit_distance(b, a));
    const double sim = name_similarity(a, b);
    CHECK(sim >= 0.0);
    CHECK(sim <= 1.0);
    CHECK((sim == 1.0) == (to_lower(a) == to_lower(b)));
  }
  CHECK(edit_distance("kitten", "sitting") == 3);
  CHECK(name_similarity("Temperature", "temp") == doctest::Approx(4.0 / 11.0));
  CHECK(name_similarity("", "") == 1.0);
}

TEST_CASE("jaccard") {
  CHECK(jaccard({"a", "b"}, {"b", "c"}) == doctest::Approx(1.0 / 3.0));
  CHECK(jaccard({"a"}, {"a"}) == 1.0);
  CHECK(jaccard({}, {"a"}) == 0.0);
  CHECK(jaccard({}, {}) == 0.0);
}

TEST_CASE("ontology documents are validated") {
  CHECK(error_code(R"({"concepts":[]})") == "MissingField");
  CHECK(error_code(R"({"name":"x"})") == "MissingField");
  CHECK(error_code(R"({"name":"x","concepts":[{"name":"A"},{"name":"A"}]})") == "DuplicateConcept");
  CHECK(error_code(R"({"name":"x","concepts":[{"name":"A","properties":[{"name":"p"},{"name":"p"}]}]})") ==
        "DuplicateProperty");
  CHECK(error_code(R"({"name":"x","concepts":[{"name":"A","parents":["B"]}]})") == "DanglingParent");
  CHECK(error_code(R"({"name":"x","concepts":[{"name":"A","parents":["B"]},{"name":"B","parents":["A"]}]})") ==
        "ParentCycle");
  CHECK(error_code(R"({"name":"x","concepts":[{"name":"A","parents":["A"]}]})") == "ParentCycle");
  CHECK(error_code(R"({"name":"x","concepts":[{"name":3}]})") == "MalformedDocument");

  const auto backbone = Ontology::parse(fixtures::backbone_ontology());
  CHECK(Ontology::from_json(backbone.to_json()) == backbone);
  CHECK(backbone.find("WeatherObserved")->parents.count("Observation") == 1);
  const auto kids = backbone.children("Observation");
  CHECK(std::find(kids.begin(), kids.end(), "WeatherObserved") != kids.end());
}

TEST_CASE("pairwise features") {
  const auto s = small_source();
  const auto t = small_target();
  const OntologyIndex si(s), ti(t);
  const auto f = extract_features(*s.find("device"), *t.find("Device"), s, t);
  CHECK(f[FeatureVector::ExactName] == 1.0);
  CHECK(f[FeatureVector::LevSim] == 1.0);
  CHECK(f[FeatureVector::TokenJaccard] == 1.0);
  // {serialnumber, modelname, firmware} vs {serialnumber, modelname, batterylevel}
  CHECK(f[FeatureVector::PropertyJaccard] == doctest::Approx(2.0 / 4.0));
  CHECK(f[FeatureVector::ParentSim] == 0.0);
  // child tokens {thermo, sensor} vs {thermometer}
  CHECK(f[FeatureVector::ChildOverlap] == 0.0);
  // {device, that, senses} vs {a, sensing, device}
  CHECK(f[FeatureVector::DescOverlap] == doctest::Approx(1.0 / 5.0));

  const auto g = extract_features(*s.find("thermoSensor"), *t.find("Thermometer"), s, t);
  CHECK(g[FeatureVector::ExactName] == 0.0);
  CHECK(g[FeatureVector::LevSim] == doctest::Approx(1.0 - 4.0 / 12.0));
  CHECK(g[FeatureVector::TokenJaccard] == 0.0);
  CHECK(g[FeatureVector::ParentSim] == 1.0);
  CHECK(g[FeatureVector::DescOverlap] == 0.0);

  CHECK(FeatureVector::from_json(f.to_json()) == f);
  CHECK_THROWS_AS(FeatureVector::from_json(Json::object()), Error);
}

TEST_CASE("candidate table is the ordered cross product") {
  const auto s = small_source();
  const auto t = small_target();
  const OntologyIndex si(s), ti(t);
  const auto table = build_candidate_table(si, ti);
  REQUIRE(table.size() == 9);
  CHECK(table.rows[0].pair_id() == "car→Device");
  CHECK(table.rows[8].pair_id() == "thermoSensor→Vehicle");
  for (const auto& r : table.rows) {
    CHECK(r.src_name == si.profiles()[r.src].name);
    CHECK(r.tgt_name == ti.profiles()[r.tgt].name);
    for (double v : r.features.values) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  CHECK(table.to_json()[4]["pairId"] == "device→Thermometer");
}

TEST_CASE("bundled knowledge functions") {
  const auto s = small_source();
  const auto t = small_target();
  const OntologyIndex si(s), ti(t);
  auto p = [](const OntologyIndex& idx, std::string_view name) -> const ConceptProfile& {
    for (const auto& pr : idx.profiles()) {
      if (pr.name == name) return pr;
    }
    FAIL("missing profile");
    return idx.profiles().front();
  };
  DisjointnessList dis = DisjointnessList::parse("# comment\n\ncar\tDevice\r\n");
  const auto kfs = bundled_knowledge_functions({}, dis);
  REQUIRE(kfs.size() == 8);
  const auto& dev = p(si, "device");
  const auto& thermo = p(si, "thermoSensor");
  const auto& car = p(si, "car");
  const auto& Dev = p(ti, "Device");
  const auto& Thermo = p(ti, "Thermometer");
  const auto& Veh = p(ti, "Vehicle");

  CHECK(vote_of(kfs, "KF-NAME-EXACT", dev, Dev) == Label::Match);
  CHECK(vote_of(kfs, "KF-NAME-EXACT", car, Dev) == Label::Abstain);
  CHECK(vote_of(kfs, "KF-NAME-SIM", dev, Dev) == Label::Match);
  CHECK(vote_of(kfs, "KF-NAME-SIM", car, Thermo) == Label::NoMatch);
  CHECK(vote_of(kfs, "KF-NAME-SIM", thermo, Thermo) == Label::Abstain);
  CHECK(vote_of(kfs, "KF-SYNONYM", thermo, Thermo) == Label::Match);
  CHECK(vote_of(kfs, "KF-SYNONYM", car, Veh) == Label::Abstain);
  CHECK(vote_of(kfs, "KF-TOKEN", dev, Dev) == Label::Match);
  CHECK(vote_of(kfs, "KF-PROPS", dev, Dev) == Label::Match);
  CHECK(vote_of(kfs, "KF-PROPS", car, Veh) == Label::NoMatch);
  CHECK(vote_of(kfs, "KF-PROPS", thermo, Veh) == Label::Abstain);
  CHECK(vote_of(kfs, "KF-PARENT", thermo, Thermo) == Label::Match);
  CHECK(vote_of(kfs, "KF-PARENT", car, Veh) == Label::Abstain);
  CHECK(vote_of(kfs, "KF-IRI", dev, Dev) == Label::Match);
  CHECK(vote_of(kfs, "KF-IRI", thermo, Dev) == Label::Abstain);
  CHECK(vote_of(kfs, "KF-DISJOINT", car, Dev) == Label::NoMatch);
  CHECK(vote_of(kfs, "KF-DISJOINT", dev, Dev) == Label::Abstain);

  KfThresholds strict;
  strict.name_sim_match = 1.1;
  CHECK(vote_of(bundled_knowledge_functions(strict), "KF-NAME-SIM", dev, Dev) == Label::Abstain);
  CHECK(KfThresholds::from_json(strict.to_json()).name_sim_match == 1.1);
  CHECK_THROWS_AS(DisjointnessList::parse("no tab here"), Error);
  CHECK(dis.size() == 1);
}

TEST_CASE("label matrix") {
  const auto s = small_source();
  const auto t = small_target();
  const OntologyIndex si(s), ti(t);
  const auto table = build_candidate_table(si, ti);
  const auto kfs = bundled_knowledge_functions();
  const auto m = apply_knowledge_functions(table, si, ti, kfs);
  REQUIRE(m.rows() == 9);
  REQUIRE(m.cols() == 8);
  CHECK(m.columns()[6] == ColumnMeta{"KF-IRI", Strength::Strong});
  std::size_t non_abstain = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const auto& r = table.rows[i];
      const auto expected = kfs[j].vote({si.profiles()[r.src], ti.profiles()[r.tgt], r.features});
      CHECK(m.at(i, j) == static_cast<std::int8_t>(expected));
      non_abstain += m.at(i, j) != 0;
    }
  }
  CHECK(m.non_abstain_total() == non_abstain);
  CHECK(LabelMatrix::from_json(m.to_json()) == m);
  LabelMatrix bad(1, {{"x", Strength::Weak}});
  CHECK_THROWS_AS(bad.set(0, 0, 2), Error);
}

TEST_CASE("kernels match their serial twins on synthetic ontologies") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto pair = synth::generate_ontology_pair(seed);
    const OntologyIndex si(pair.source), ti(pair.target);
    const auto table = build_candidate_table(si, ti);
    const auto ref = reference::build_candidate_table(si, ti);
    REQUIRE(table.size() == ref.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
      CHECK(table.rows[i].pair_id() == ref.rows[i].pair_id());
      CHECK(table.rows[i].features == ref.rows[i].features);
    }
    const auto kfs = bundled_knowledge_functions();
    CHECK(apply_knowledge_functions(table, si, ti, kfs) == reference::apply_knowledge_functions(ref, si, ti, kfs));
  }
}
