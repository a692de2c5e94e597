// geosketch: validate sketches, build layered models, or run the HTTP service.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "geosketch/error.hpp"
#include "geosketch/json_format.hpp"
#include "geosketch/pipeline.hpp"
#include "geosketch/service.hpp"

namespace fs = std::filesystem;
using namespace geosketch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitGeology = 1;
constexpr int kExitInput = 2;
constexpr int kExitIo = 3;

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return std::nullopt;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Reads and parses; prints the reason and returns nullopt on failure.
std::optional<MapSketch> load_sketch(const std::string& path) {
    const auto text = read_file(path);
    if (!text) {
        std::cerr << "error: cannot read '" << path << "'\n";
        return std::nullopt;
    }
    try {
        return parse_sketch(*text);
    } catch (const SyntaxError& e) {
        std::cerr << "error: " << path << ": malformed JSON at byte " << e.byte_offset() << ": " << e.what() << '\n';
    } catch (const Error& e) {
        std::cerr << "error: " << path << ": " << e.what() << '\n';
    }
    return std::nullopt;
}

int cmd_validate(const std::string& path, bool as_json) {
    const auto sketch = load_sketch(path);
    if (!sketch) {
        return kExitInput;
    }
    const ValidationReport report = run_validate(*sketch);
    if (as_json) {
        std::cout << dump_deterministic(to_json(report));
    } else {
        std::cout << to_text(report);
    }
    return report.ok() ? kExitOk : kExitGeology;
}

bool parse_grid(const std::string& text, BuildOptions& options) {
    static const std::regex pattern(R"((\d+)(?:x(\d+))?)");
    std::smatch m;
    if (!std::regex_match(text, m, pattern)) {
        return false;
    }
    try {
        options.nx = std::stoul(m[1].str());
        options.ny = m[2].matched ? std::stoul(m[2].str()) : options.nx;
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

int cmd_build(const std::string& path, const std::string& out_dir, const BuildOptions& options) {
    const auto sketch = load_sketch(path);
    if (!sketch) {
        return kExitInput;
    }
    const BuildResult result = run_build(*sketch, options);
    for (const auto& d : result.diagnostics) {
        std::cerr << to_string(d.severity) << ' ' << d.path << ": " << d.message << '\n';
    }
    if (result.failure) {
        std::cerr << "error: " << result.failure->type << ": " << result.failure->message << '\n';
    }

    try {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec || !fs::is_directory(out_dir)) {
            throw IoError("cannot create output directory '" + out_dir + "'");
        }
        auto write = [&](const std::string& name, const std::string& bytes) {
            const fs::path target = fs::path(out_dir) / name;
            std::ofstream out(target, std::ios::binary);
            out << bytes;
            out.flush();
            if (!out) {
                throw IoError("cannot write '" + target.string() + "'");
            }
        };
        for (const auto& [name, bytes] : result.artifacts) {
            write(name, bytes);
        }
        write("report.json", dump_deterministic(to_json(result, false)));
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }

    if (!result.ok()) {
        return kExitGeology;
    }
    std::cout << "wrote " << (fs::path(out_dir) / "model.obj").string() << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Build layered 3D geological models from map sketches"};
    app.require_subcommand(1);

    std::string path;
    bool as_json = false;
    auto* validate = app.add_subcommand("validate", "Check a sketch and print the relative age order");
    validate->add_option("sketch", path, "Sketch JSON file")->required();
    validate->add_flag("--json", as_json, "Print a JSON report");

    std::string out_dir = "out";
    std::string grid = "128";
    std::optional<double> spacing;
    std::optional<double> base;
    auto* build = app.add_subcommand("build", "Build the model and write model.obj, terrain.json, report.json");
    build->add_option("sketch", path, "Sketch JSON file")->required();
    build->add_option("--out", out_dir, "Output directory")->capture_default_str();
    build->add_option("--grid", grid, "Grid nodes, N or NxM (2..2048)")->capture_default_str();
    build->add_option("--spacing", spacing, "Line sample spacing in meters");
    build->add_option("--base", base, "Model base elevation in meters");

    std::string host = "0.0.0.0";
    int port = service_port_from_env();
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    serve_cmd->add_option("--port", port, "Listen port (env GEOSKETCHER_PORT)")->capture_default_str();
    serve_cmd->add_option("--host", host, "Listen address")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    if (validate->parsed()) {
        return cmd_validate(path, as_json);
    }
    if (build->parsed()) {
        BuildOptions options;
        options.spacing = spacing;
        options.model_base = base;
        if (!parse_grid(grid, options)) {
            std::cerr << "error: --grid expects N or NxM\n";
            return kExitInput;
        }
        try {
            options.check();
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitInput;
        }
        return cmd_build(path, out_dir, options);
    }
    std::cerr << "serving on " << host << ':' << port << '\n';
    if (!serve(host, port)) {
        std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
        return kExitIo;
    }
    return kExitOk;
}
