#pragma once

#include <cstddef>

#include "httplib.h"
#include "sentinel/service.hpp"

namespace sentinel::service {

inline constexpr std::size_t kMaxRequestBytes = 256 * 1024;

/// Installs the /v1 endpoints, the request size cap and JSON error bodies.
void install_routes(httplib::Server& server, TelemetryService& service);

}  // namespace sentinel::service
