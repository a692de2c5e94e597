#pragma once

#include <cstddef>
#include <string>

namespace httplib {
class Server;
}

namespace geosketch {

inline constexpr int kDefaultPort = 7878;
inline constexpr std::size_t kMaxRequestBytes = 16u << 20;

/// Installs the /v1 routes, body size limit and timeouts on `server`.
void configure_service(httplib::Server& server);

/// Port from GEOSKETCHER_PORT, else kDefaultPort.
int service_port_from_env();

/// Blocks serving on host:port. Returns false if the port cannot be bound.
bool serve(const std::string& host, int port);

}  // namespace geosketch
