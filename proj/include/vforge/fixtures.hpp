#pragma once

#include <string_view>

namespace vforge::fixtures {

/// Weather-station samples, one document per line.
std::string_view weather_samples();
/// Backbone ontology with weather, device, vehicle and city concepts.
std::string_view backbone_ontology();
/// Entity batch in the style of a small city scene (cars, camera, building).
std::string_view city_entities();

}  // namespace vforge::fixtures
