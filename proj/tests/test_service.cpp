#include <doctest.h>

#include <future>
#include <thread>

#include <json.hpp>

#include "geosketch/service.hpp"
#include "support.hpp"

#include <httplib.h>

using nlohmann::json;

namespace {

class Harness {
  public:
    Harness() {
        geosketch::configure_service(server_);
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~Harness() {
        server_.stop();
        thread_.join();
    }
    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port_);
        c.set_read_timeout(60, 0);
        c.set_write_timeout(60, 0);
        return c;
    }

  private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

std::string decode_base64(const std::string& in) {
    static const std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    unsigned buffer = 0;
    int bits = 0;
    for (const char ch : in) {
        if (ch == '=') {
            break;
        }
        const auto pos = alphabet.find(ch);
        if (pos == std::string::npos) {
            return {};
        }
        buffer = (buffer << 6) | static_cast<unsigned>(pos);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<char>((buffer >> bits) & 0xFF));
        }
    }
    return out;
}

std::string build_body(const std::string& fixture, int grid) {
    return "{\"grid\": " + std::to_string(grid) +
           ", \"sketch\": " + testsupport::read_text(testsupport::fixture_path(fixture)) + "}";
}

}  // namespace

TEST_CASE("base64 test decoder") { CHECK(decode_base64("aGVsbG8gd29ybGQ=") == "hello world"); }

TEST_CASE("service endpoints") {
    Harness h;
    auto client = h.client();

    SUBCASE("health") {
        const auto res = client.Get("/v1/health");
        REQUIRE(res);
        CHECK(res->status == 200);
        CHECK(json::parse(res->body) == json{{"status", "ok"}});
    }
    SUBCASE("validate reports the cycle") {
        const auto res = client.Post("/v1/validate", testsupport::read_text(testsupport::fixture_path("cyclic_relations.json")),
                                     "application/json");
        REQUIRE(res);
        CHECK(res->status == 200);
        const json body = json::parse(res->body);
        CHECK(body["ok"] == false);
        CHECK(body["cycle"]["units"] == json{"A", "B"});
    }
    SUBCASE("validate a good sketch") {
        const auto res = client.Post("/v1/validate", testsupport::read_text(testsupport::fixture_path("tilted_layers.json")),
                                     "application/json");
        REQUIRE(res);
        CHECK(res->status == 200);
        const json body = json::parse(res->body);
        CHECK(body["ok"] == true);
        CHECK(body["age_order"] == json{"C", "B", "A"});
    }
    SUBCASE("build returns base64 artifacts") {
        const auto res = client.Post("/v1/build", build_body("flat_layers.json", 24), "application/json");
        REQUIRE(res);
        CHECK(res->status == 200);
        const json body = json::parse(res->body);
        CHECK(body["ok"] == true);
        const std::string obj = decode_base64(body["artifacts"]["model.obj"].get<std::string>());
        const auto stats = testsupport::read_obj(obj);
        CHECK(stats.parsed);
        CHECK(stats.indices_valid);
        CHECK(stats.per_object.at("terrain").first == 24u * 24u);
        const json terrain = json::parse(decode_base64(body["artifacts"]["terrain.json"].get<std::string>()));
        CHECK(terrain["nx"] == 24);
        CHECK(terrain["z"].size() == 24u * 24u);
        CHECK(!body.contains("timings_ms"));
        CHECK(res->get_header_value("Server-Timing").find("terrain;dur=") != std::string::npos);
    }
    SUBCASE("build with Accept model/obj") {
        const auto res = client.Post("/v1/build", {{"Accept", "model/obj"}}, build_body("flat_layers.json", 16),
                                     "application/json");
        REQUIRE(res);
        CHECK(res->status == 200);
        CHECK(res->get_header_value("Content-Type") == "model/obj");
        CHECK(res->body.rfind("o terrain\n", 0) == 0);
    }
    SUBCASE("malformed and invalid requests are 400") {
        auto res = client.Post("/v1/build", "{\"sketch\": ", "application/json");
        REQUIRE(res);
        CHECK(res->status == 400);
        res = client.Post("/v1/build", "{\"sketch\": {}, \"grid\": 16}", "application/json");
        REQUIRE(res);
        CHECK(res->status == 400);
        CHECK(json::parse(res->body)["diagnostics"].size() == 1);
        res = client.Post("/v1/build", build_body("flat_layers.json", 1), "application/json");
        REQUIRE(res);
        CHECK(res->status == 400);
        CHECK(json::parse(res->body)["diagnostics"][0]["path"] == "/grid");
        res = client.Post("/v1/validate", "[1, 2]", "application/json");
        REQUIRE(res);
        CHECK(res->status == 400);
    }
    SUBCASE("geology failure is 422") {
        const auto res = client.Post("/v1/build", build_body("cyclic_relations.json", 16), "application/json");
        REQUIRE(res);
        CHECK(res->status == 422);
        const json body = json::parse(res->body);
        CHECK(body["ok"] == false);
        CHECK(body["failure"]["type"] == "CyclicRelations");
    }
    SUBCASE("oversize body is 413") {
        const std::string big(geosketch::kMaxRequestBytes + 1024, ' ');
        const auto res = client.Post("/v1/validate", big, "application/json");
        REQUIRE(res);
        CHECK(res->status == 413);
    }
}

TEST_CASE("concurrent identical builds return identical bodies") {
    Harness h;
    const std::string body = build_body("erosional_truncation.json", 32);
    std::vector<std::future<std::string>> futures;
    for (int k = 0; k < 4; ++k) {
        futures.push_back(std::async(std::launch::async, [&] {
            auto client = h.client();
            const auto res = client.Post("/v1/build", body, "application/json");
            return res && res->status == 200 ? res->body : std::string();
        }));
    }
    std::vector<std::string> bodies;
    for (auto& f : futures) {
        bodies.push_back(f.get());
    }
    CHECK(!bodies[0].empty());
    for (const auto& b : bodies) {
        CHECK(b == bodies[0]);
    }
}
