#include "vforge/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "vforge/error.hpp"

namespace vforge::synth {

SyntheticVotes generate_label_matrix(double prior, const std::vector<double>& accuracy,
                                     const std::vector<double>& propensity, std::size_t rows,
                                     std::uint64_t seed) {
  if (accuracy.size() != propensity.size()) {
    fail("InvalidArgument", "accuracy and propensity lists differ in length");
  }
  std::vector<onto::ColumnMeta> cols;
  for (std::size_t j = 0; j < accuracy.size(); ++j) cols.push_back({"LF" + std::to_string(j), onto::Strength::Weak});
  SyntheticVotes out{onto::LabelMatrix(rows, std::move(cols)), {}};
  out.truth.reserve(rows);
  Rng rng(seed);
  for (std::size_t i = 0; i < rows; ++i) {
    const int y = rng.chance(prior) ? 1 : -1;
    out.truth.push_back(y);
    for (std::size_t j = 0; j < accuracy.size(); ++j) {
      if (!rng.chance(propensity[j])) continue;
      const int v = rng.chance(accuracy[j]) ? y : -y;
      out.matrix.set(i, j, static_cast<std::int8_t>(v));
    }
  }
  return out;
}

namespace {

struct Blueprint {
  const char* name;
  const char* parent;
  std::vector<const char*> synonyms;
  std::vector<const char*> properties;
  const char* description;
};

// Smart-Data-Models-flavoured backbone.
const std::vector<Blueprint>& blueprints() {
  static const std::vector<Blueprint> table = {
      {"Observation", "", {"Measurement"},
       {"dateObserved", "location", "source", "dataProvider"},
       "generic observation made at a place and time"},
      {"WeatherObserved", "Observation", {"WeatherReport"},
       {"temperature", "relativeHumidity", "windSpeed", "windDirection", "atmosphericPressure",
        "precipitation", "dateObserved", "location"},
       "observation of weather conditions at a place and time"},
      {"AirQualityObserved", "Observation", {"AirQualityReport"},
       {"no2", "pm10", "pm25", "o3", "co", "airQualityIndex", "dateObserved", "location"},
       "air quality and pollutant concentrations measured at a station"},
      {"NoiseLevelObserved", "Observation", {"NoiseReading"},
       {"LAeq", "LAmax", "LAS", "dateObservedFrom", "dateObservedTo", "location"},
       "noise level measured over a period at a place"},
      {"WaterQualityObserved", "Observation", {"WaterSample"},
       {"pH", "turbidity", "conductivity", "dissolvedOxygen", "temperature", "dateObserved"},
       "water quality parameters measured in a water body"},
      {"TrafficFlowObserved", "Observation", {"TrafficCount"},
       {"intensity", "occupancy", "averageVehicleSpeed", "laneId", "congested", "dateObserved"},
       "traffic flow counted on a road segment lane"},
      {"Device", "", {"Sensor"},
       {"serialNumber", "firmwareVersion", "batteryLevel", "deviceState", "controlledProperty",
        "dateInstalled"},
       "apparatus that measures or controls a physical property"},
      {"Camera", "Device", {"VideoCamera"},
       {"streamURL", "resolution", "frameRate", "cameraUsage", "zoomLevel"},
       "camera device producing a video stream"},
      {"Streetlight", "Device", {"StreetLamp"},
       {"powerState", "illuminanceLevel", "lanternHeight", "lampTechnology", "powerConsumption"},
       "street light installed along a road"},
      {"SmartMeter", "Device", {"EnergyMeter"},
       {"totalActiveEnergyImport", "totalActivePower", "voltage", "current", "meterType"},
       "meter recording electrical energy consumption"},
      {"Thermostat", "Device", {"ClimateController"},
       {"targetTemperature", "currentTemperature", "mode", "scheduleProfile"},
       "controller regulating room temperature"},
      {"Place", "", {"Site"},
       {"address", "location", "name", "areaServed"},
       "physical place with an address"},
      {"Building", "Place", {"Edifice"},
       {"floorsAboveGround", "floorsBelowGround", "category", "owner", "occupier", "address"},
       "building with floors owners and occupiers"},
      {"Shop", "Place", {"Store"},
       {"openingHours", "category", "owner", "address", "telephone"},
       "retail shop selling goods"},
      {"ParkingSpot", "Place", {"ParkingBay"},
       {"status", "category", "width", "length", "refParkingSite"},
       "single parking space for one vehicle"},
      {"OffStreetParking", "Place", {"CarPark"},
       {"totalSpotNumber", "availableSpotNumber", "occupancyDetectionType", "openingHours",
        "chargeType"},
       "parking site outside the street with many spots"},
      {"PointOfInterest", "Place", {"Landmark"},
       {"category", "address", "openingHours", "contactPoint"},
       "point of interest visited by tourists"},
      {"Park", "Place", {"Garden"},
       {"openingHours", "surface", "petsAllowed", "category"},
       "public park or garden"},
      {"Vehicle", "", {"Automobile", "Car"},
       {"vehicleType", "speed", "heading", "fuelLevel", "mileageFromOdometer",
        "vehiclePlateIdentifier", "location"},
       "vehicle moving with a speed and heading"},
      {"PublicTransportStop", "Place", {"TransitStop"},
       {"stopCode", "wheelChairAccessibleStatus", "transportationType", "refPublicTransportRoute",
        "address"},
       "stop where passengers board public transport"},
      {"Person", "", {"Individual"},
       {"givenName", "familyName", "email", "telephone", "birthDate"},
       "person with a name and contact details"},
      {"Organization", "", {"Company"},
       {"legalName", "vatID", "address", "telephone", "email"},
       "legal organization or company"},
      {"PowerPole", "", {"UtilityPole"},
       {"height", "material", "owner", "installationDate", "location"},
       "pole carrying power lines"},
      {"WasteContainer", "Device", {"GarbageBin"},
       {"fillingLevel", "temperature", "storedWasteKind", "status", "location"},
       "container collecting waste"},
      {"Alert", "", {"Warning"},
       {"alertSource", "category", "subCategory", "severity", "dateIssued", "validTo"},
       "alert about an event requiring attention"},
      {"Road", "Place", {"Street"},
       {"roadClass", "length", "totalLaneNumber", "responsible"},
       "road connecting places"},
      {"BikeHireDockingStation", "Place", {"BikeStation"},
       {"availableBikeNumber", "freeSlotNumber", "totalSlotNumber", "status"},
       "docking station for hire bikes"},
      {"EVChargingStation", "Place", {"ChargingPoint"},
       {"capacity", "availableCapacity", "socketType", "chargeType", "allowedVehicleType"},
       "charging station for electric vehicles"},
      {"Beach", "Place", {"Seaside"},
       {"beachType", "width", "length", "occupationRate", "facilities"},
       "beach along the sea"},
      {"AgriParcel", "Place", {"Plot"},
       {"area", "cropStatus", "hasAgriCrop", "soilTextureType", "irrigationSystemType"},
       "agricultural parcel of land with a crop"},
  };
  return table;
}

const std::vector<const char*> kNoiseProperties = {"note", "internalCode", "lastSync",
                                                   "sourceSystem", "comment", "rev"};

std::vector<std::string> camel_tokens(const std::string& name) {
  // Keep original casing of each token; reuse the tokenizer boundaries.
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (const auto& lower : onto::tokenize_name(name)) {
    while (pos < name.size() && !std::isalnum(static_cast<unsigned char>(name[pos]))) ++pos;
    out.push_back(name.substr(pos, lower.size()));
    pos += lower.size();
  }
  return out;
}

std::string snake_case(const std::string& name) {
  std::string out;
  for (const auto& t : onto::tokenize_name(name)) {
    if (!out.empty()) out += '_';
    out += t;
  }
  return out;
}

std::string perturb_name(const Blueprint& b, Rng& rng) {
  const std::string name = b.name;
  auto tokens = camel_tokens(name);
  const double r = rng.uniform();
  if (r < 0.25) {
    return rng.chance(0.5) ? onto::to_lower(name) : snake_case(name);
  }
  if (r < 0.50) {
    // single-character typo: delete or swap adjacent characters
    std::string s = name;
    std::size_t i = 1 + rng.below(s.size() - 2);
    if (rng.chance(0.5)) {
      s.erase(i, 1);
    } else {
      std::swap(s[i], s[i + 1]);
    }
    return s;
  }
  if (r < 0.65) {
    static const char* kSuffixes[] = {"Info", "Entity", "Data"};
    return name + kSuffixes[rng.below(3)];
  }
  if (r < 0.75 && tokens.size() >= 2 && tokens.back().size() >= 6) {
    // abbreviate the last token
    tokens.back() = tokens.back().substr(0, 4);
    std::string s;
    for (const auto& t : tokens) s += t;
    return s;
  }
  if (r < 0.75) return onto::to_lower(name);
  return b.synonyms[rng.below(b.synonyms.size())];
}

std::string perturb_property(const std::string& p, Rng& rng) {
  const double r = rng.uniform();
  if (r < 0.15) return snake_case(p);
  if (r < 0.30) return onto::to_lower(p);
  return p;
}

std::string thin_description(const std::string& text, Rng& rng) {
  std::string out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find(' ', start);
    if (end == std::string::npos) end = text.size();
    if (!rng.chance(0.3)) {
      if (!out.empty()) out += ' ';
      out += text.substr(start, end - start);
    }
    start = end + 1;
  }
  return out;
}

}  // namespace

OntologyPair generate_ontology_pair(std::uint64_t seed, std::size_t concepts) {
  const auto& table = blueprints();
  if (concepts == 0 || concepts > table.size()) {
    fail("InvalidArgument", "synthetic benchmark supports 1.." + std::to_string(table.size()) + " concepts");
  }
  Rng rng(seed);
  OntologyPair out{onto::Ontology("backbone"), onto::Ontology("source"), {}, {}};

  std::set<std::string> chosen;
  for (std::size_t i = 0; i < concepts; ++i) chosen.insert(table[i].name);

  std::map<std::string, std::string> renamed;
  std::set<std::string> used;
  for (std::size_t i = 0; i < concepts; ++i) {
    std::string s = perturb_name(table[i], rng);
    while (used.count(s)) s += "2";
    used.insert(s);
    renamed[table[i].name] = s;
  }

  for (std::size_t i = 0; i < concepts; ++i) {
    const auto& b = table[i];
    const bool has_parent = *b.parent && chosen.count(b.parent);

    onto::Concept tgt;
    tgt.name = b.name;
    tgt.description = b.description;
    if (has_parent) tgt.parents.insert(b.parent);
    for (const auto* p : b.properties) tgt.properties.push_back({p, "Text", {}});
    for (const auto* s : b.synonyms) tgt.synonyms.insert(s);

    onto::Concept src;
    src.name = renamed[b.name];
    if (has_parent) src.parents.insert(renamed[b.parent]);
    std::set<std::string> seen;
    for (const auto* p : b.properties) {
      if (!rng.chance(0.75)) continue;
      auto name = perturb_property(p, rng);
      if (seen.insert(name).second) src.properties.push_back({name, "Text", {}});
    }
    const std::size_t noise = rng.below(3);
    for (std::size_t k = 0; k < noise; ++k) {
      std::string name = kNoiseProperties[rng.below(kNoiseProperties.size())];
      if (seen.insert(name).second) src.properties.push_back({name, "Text", {}});
    }
    if (src.properties.empty()) src.properties.push_back({b.properties.front(), "Text", {}});
    if (rng.chance(0.5)) src.description = thin_description(b.description, rng);
    if (rng.chance(0.1)) {
      std::string iri = std::string("https://smartdatamodels.org/dataModel/") + b.name;
      tgt.iri = iri;
      src.iri = iri;
    }

    out.truth.emplace(src.name, tgt.name);
    out.target.add(std::move(tgt));
    out.source.add(std::move(src));
  }
  // Drawn after every concept so earlier draws stay unchanged.
  for (std::size_t i = 0; i < concepts; ++i) {
    if (!rng.chance(0.2) || concepts < 2) continue;
    std::size_t other = rng.below(concepts - 1);
    if (other >= i) ++other;
    out.disjoint.add(renamed[table[i].name], table[other].name);
  }
  out.target.validate();
  out.source.validate();
  return out;
}

Scorecard evaluate(const ki::MatchResult& result, const Alignment& truth) {
  Scorecard s;
  for (const auto& m : result.matches) {
    if (truth.count({m.src, m.tgt})) {
      ++s.true_positives;
    } else {
      ++s.false_positives;
    }
  }
  s.false_negatives = truth.size() - s.true_positives;
  const double tp = static_cast<double>(s.true_positives);
  s.precision = result.matches.empty() ? 0.0 : tp / static_cast<double>(result.matches.size());
  s.recall = truth.empty() ? 0.0 : tp / static_cast<double>(truth.size());
  s.f1 = (s.precision + s.recall) > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

}  // namespace vforge::synth
