#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>


#include "geosketch/service.hpp"
#include "support.hpp"

#include <httplib.h>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("geosketch_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir.parent_path());
    return dir;
}

int run(const std::string& args) {
    const std::string command = std::string(GEOSKETCH_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string fixture(const std::string& name) { return "'" + testsupport::fixture_path(name) + "'"; }

}  // namespace

TEST_CASE("validate exit codes") {
    CHECK(run("validate " + fixture("tilted_layers.json")) == 0);
    CHECK(run("validate --json " + fixture("erosional_truncation.json")) == 0);
    CHECK(run("validate " + fixture("cyclic_relations.json")) == 1);

    const fs::path broken = scratch("broken.json");
    {
        const std::string text = testsupport::read_text(testsupport::fixture_path("flat_layers.json"));
        std::ofstream(broken) << text.substr(0, text.size() / 2);
    }
    CHECK(run("validate '" + broken.string() + "'") == 2);
    CHECK(run("validate /nonexistent/sketch.json") == 2);
    CHECK(run("frobnicate") == 2);
}

TEST_CASE("build writes the artifacts") {
    const fs::path out = scratch("build64");
    CHECK(run("build " + fixture("flat_layers.json") + " --grid 64 --out '" + out.string() + "'") == 0);
    REQUIRE(fs::exists(out / "model.obj"));
    CHECK(fs::exists(out / "terrain.json"));
    CHECK(fs::exists(out / "report.json"));
    const auto stats = testsupport::read_obj(testsupport::read_text((out / "model.obj").string()));
    CHECK(stats.parsed);
    CHECK(stats.indices_valid);
    // terrain, two horizons, base and three skirts
    CHECK(stats.objects.size() == 7);
    CHECK(stats.per_object.at("terrain").first == 64u * 64u);
    CHECK(stats.per_object.at("terrain").second == 2u * 63u * 63u);
}

TEST_CASE("build failures") {
    CHECK(run("build " + fixture("flat_layers.json") + " --grid 1 --out '" + scratch("g1").string() + "'") == 2);
    CHECK(run("build " + fixture("flat_layers.json") + " --grid 5000 --out '" + scratch("g2").string() + "'") == 2);
    CHECK(run("build " + fixture("flat_layers.json") + " --grid 8x --out '" + scratch("g3").string() + "'") == 2);

    const fs::path blocker = scratch("blocker");
    std::ofstream(blocker) << "not a directory";
    CHECK(run("build " + fixture("flat_layers.json") + " --grid 16 --out '" + (blocker / "sub").string() + "'") == 3);

    CHECK(run("build " + fixture("cyclic_relations.json") + " --grid 16 --out '" + scratch("cyc").string() + "'") == 1);
}

TEST_CASE("CLI and service produce the same OBJ") {
    const fs::path out = scratch("same");
    REQUIRE(run("build " + fixture("tilted_layers.json") + " --grid 48 --out '" + out.string() + "'") == 0);
    const std::string from_cli = testsupport::read_text((out / "model.obj").string());

    httplib::Server server;
    geosketch::configure_service(server);
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(60, 0);
    const std::string body =
        "{\"grid\": 48, \"sketch\": " + testsupport::read_text(testsupport::fixture_path("tilted_layers.json")) + "}";
    const auto res = client.Post("/v1/build", {{"Accept", "model/obj"}}, body, "application/json");
    server.stop();
    thread.join();

    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body == from_cli);
}
