#include "geosketch/service.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

#include <json.hpp>

#include "geosketch/error.hpp"
#include "geosketch/pipeline.hpp"

// httplib pulls in <resolv.h>, whose _res macro breaks Eigen if seen first.
#include <httplib.h>

namespace geosketch {

using nlohmann::json;

namespace {

void reply_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

/// 400 with a diagnostic list for transport and schema failures.
void reply_input_error(httplib::Response& res, const Error& e, const std::string& path) {
    json diag = json::array({{{"severity", "ERROR"}, {"message", e.what()}, {"path", path}}});
    reply_json(res, 400, {{"error", "invalid_request"}, {"diagnostics", diag}});
}

template <typename Handler>
void guarded(httplib::Response& res, Handler&& handler) {
    try {
        handler();
    } catch (const SyntaxError& e) {
        reply_input_error(res, e, "@" + std::to_string(e.byte_offset()));
    } catch (const SchemaError& e) {
        reply_input_error(res, e, e.path());
    } catch (const ReferenceError& e) {
        reply_input_error(res, e, e.path());
    } catch (const std::exception& e) {
        reply_json(res, 500, {{"error", "internal"}, {"message", e.what()}});
    }
}

/// Per-stage timings go to a Server-Timing header so identical requests get
/// identical bodies.
void reply_build(httplib::Response& res, int status, const BuildResult& result, bool embed) {
    json body = to_json(result, embed);
    body.erase("timings_ms");
    std::string timing;
    for (const auto& [stage, ms] : result.timings_ms) {
        char entry[96];
        std::snprintf(entry, sizeof entry, "%s%s;dur=%.3f", timing.empty() ? "" : ", ", stage.c_str(), ms);
        timing += entry;
    }
    if (!timing.empty()) {
        res.set_header("Server-Timing", timing);
    }
    reply_json(res, status, body);
}

}  // namespace

void configure_service(httplib::Server& server) {
    server.set_payload_max_length(kMaxRequestBytes);
    server.set_read_timeout(30, 0);
    server.set_write_timeout(30, 0);

    server.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
        reply_json(res, 200, {{"status", "ok"}});
    });

    server.Post("/v1/validate", [](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const MapSketch sketch = parse_sketch(req.body);
            reply_json(res, 200, to_json(run_validate(sketch)));
        });
    });

    server.Post("/v1/build", [](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const BuildRequest request = parse_build_request(req.body);
            const BuildResult result = run_build(request.sketch, request.options);
            if (!result.ok()) {
                reply_build(res, 422, result, false);
                return;
            }
            const std::string accept = req.get_header_value("Accept");
            if (accept.find("model/obj") != std::string::npos) {
                res.status = 200;
                res.set_content(result.artifacts.at("model.obj"), "model/obj");
                return;
            }
            reply_build(res, 200, result, true);
        });
    });
}

int service_port_from_env() {
    if (const char* env = std::getenv("GEOSKETCHER_PORT")) {
        try {
            const int port = std::stoi(env);
            if (port > 0 && port < 65536) {
                return port;
            }
        } catch (const std::exception&) {
        }
    }
    return kDefaultPort;
}

bool serve(const std::string& host, int port) {
    httplib::Server server;
    configure_service(server);
    return server.listen(host, port);
}

}  // namespace geosketch
