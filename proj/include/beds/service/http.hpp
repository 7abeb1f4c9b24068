#pragma once

#include "beds/service/service.hpp"

#include <httplib.h>

namespace beds::service {

// GET /heatmap, POST /recommend, POST /book, GET /state, GET /health.
void mount_routes(httplib::Server& server, SchedulingService& service);

// Blocks until the server stops. Returns false when binding fails.
bool serve(SchedulingService& service, httplib::Server& server);

}  // namespace beds::service
