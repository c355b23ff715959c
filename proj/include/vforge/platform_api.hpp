#pragma once

#include "httplib.h"
#include "vforge/platform.hpp"

namespace vforge::platform {

/// Mounts the control-plane routes:
///   POST /api/thingvisors, GET /api/thingvisors, GET /api/vthings,
///   POST /api/vsilos, GET /api/vsilos, POST /api/vsilos/{id}/vthings,
///   GET /api/vsilos/{id}/entities/{ref},
///   POST /api/thingvisors/{id}/replay, POST /api/thingvisors/{id}/data.
void mount_platform_api(httplib::Server& server, MasterController& controller);

}  // namespace vforge::platform
