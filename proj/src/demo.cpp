#include "vforge/demo.hpp"

#include "vforge/benchmark.hpp"
#include "vforge/bus.hpp"
#include "vforge/fixtures.hpp"
#include "vforge/io.hpp"
#include "vforge/pipeline.hpp"
#include "vforge/platform.hpp"

namespace vforge::demo {

namespace {

using platform::Flavour;

constexpr Flavour kFlavours[] = {Flavour::OneM2M, Flavour::NgsiV2, Flavour::NgsiLd, Flavour::Mqtt};

}  // namespace

Json run_demo(const DemoOptions& options) {
  namespace fs = std::filesystem;
  const fs::path input = options.out / "input";
  const fs::path weather_path = input / "weather_samples.jsonl";
  const fs::path city_path = input / "city_entities.jsonl";
  io::write_file(weather_path, std::string(fixtures::weather_samples()));
  io::write_file(city_path, std::string(fixtures::city_entities()));
  io::write_file(input / "backbone.json", std::string(fixtures::backbone_ontology()));

  const auto samples = io::parse_json_lines(std::string(fixtures::weather_samples()));
  const auto target = onto::Ontology::parse(fixtures::backbone_ontology());
  pipeline::PipelineOptions popts;
  popts.root_name = kWeatherRoot;
  popts.auto_approve = true;
  popts.seed = options.seed;
  popts.epoch = options.epoch;
  popts.out_dir = options.out / "pipeline";
  const auto result = pipeline::run_pipeline(samples, target, popts);

  bus::Bus bus;
  platform::MasterController mc(bus);

  platform::ThingVisorDescriptor weather;
  weather.id = "weather-tv";
  weather.source_config = {{"path", weather_path.string()}};
  weather.translation_config_ref = (options.out / "pipeline" / pipeline::artifact::kConfig).string();
  weather.vthings = {{"observations", "WeatherObserved"}, {"devices", "Device"}};
  mc.register_thingvisor(weather);

  platform::ThingVisorDescriptor city;
  city.id = "city-tv";
  city.source_config = {{"path", city_path.string()}};
  city.vthings = {{"vehicles", "Car"}, {"cameras", "Camera"}, {"buildings", "Building"}};
  mc.register_thingvisor(city);

  for (Flavour f : kFlavours) {
    const auto silo = mc.create_vsilo("demo", flavour_name(f));
    for (const auto& v : mc.vthings()) mc.add_vthing_to_silo(silo.id, v.id);
  }

  Json replayed = Json::object();
  for (const auto& tv : {weather.id, city.id}) replayed[tv] = mc.replay(tv);
  mc.flush();

  Json silos = Json::object();
  for (const auto& s : mc.vsilos()) {
    const Json dump = mc.silo_dump(s.id);
    io::write_file(options.out / "silos" / (s.id + ".json"), dump_pretty(dump));
    silos[s.id] = s.to_json();
  }
  Json vthings = Json::array();
  for (const auto& v : mc.vthings()) vthings.push_back(v.to_json());
  io::write_file(options.out / "platform" / "vthings.json", dump_pretty(vthings));
  mc.stop();
  bus.close();

  const auto bench = synth::run_matching_benchmark(options.seed);
  io::write_file(options.out / "benchmark.json", dump_pretty(bench.to_json()));

  Json summary = {{"matches", result.match.matches.to_json()},
                  {"session", result.session.summary_json()},
                  {"replayed", replayed},
                  {"silos", silos},
                  {"benchmark", {{"classifierF1", bench.classifier.f1}, {"generativeF1", bench.generative.f1}}}};
  io::write_file(options.out / "summary.json", dump_pretty(summary));
  return summary;
}

}  // namespace vforge::demo
