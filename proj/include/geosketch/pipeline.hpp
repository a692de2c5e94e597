#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "geosketch/diagnostic.hpp"
#include "geosketch/sketch.hpp"
#include "geosketch/strat_graph.hpp"
#include "geosketch/terrain.hpp"

namespace geosketch {

struct BuildOptions {
    std::size_t nx = 128;
    std::size_t ny = 128;
    std::optional<double> spacing;
    std::optional<double> model_base;

    /// Throws std::invalid_argument unless both axes are in [2, 2048] and spacing > 0.
    void check() const;
};

struct BuildRequest {
    MapSketch sketch;
    BuildOptions options;
};

/// Geology-level failure: the sketch is well formed but no model exists.
struct BuildFailure {
    std::string type;  // "CyclicRelations", "SingularSystem", "NoValueAnchor", ...
    std::string message;
    std::vector<std::string> cycle;
};

struct ValidationReport {
    std::vector<Diagnostic> diagnostics;
    std::variant<AgeOrder, CycleDiagnostic> ages;
    std::vector<std::string> horizon_order;  // empty when ages is a cycle

    bool ok() const { return !has_errors(diagnostics) && std::holds_alternative<AgeOrder>(ages); }
};

struct BuildResult {
    std::optional<AgeOrder> age_order;
    std::vector<Diagnostic> diagnostics;
    std::optional<BuildFailure> failure;
    /// "model.obj" and "terrain.json"; present iff the build succeeded.
    std::map<std::string, std::string> artifacts;
    std::map<std::string, double> timings_ms;
    std::size_t terrain_rows = 0;
    std::map<std::string, std::size_t> horizon_rows;

    bool ok() const { return !failure && !has_errors(diagnostics); }
};

ValidationReport run_validate(const MapSketch& sketch);
BuildResult run_build(const MapSketch& sketch, const BuildOptions& options);

/// Parses {"sketch": {...}, "grid": N | [nx, ny], "spacing": s, "model_base": b}.
/// Throws SyntaxError, SchemaError, ReferenceError.
BuildRequest parse_build_request(std::string_view json_text);

nlohmann::json diagnostics_json(const std::vector<Diagnostic>& diagnostics);
nlohmann::json to_json(const ValidationReport& report);
std::string to_text(const ValidationReport& report);
/// With artifacts embedded as base64 when `embed_artifacts`, else listed by size.
nlohmann::json to_json(const BuildResult& result, bool embed_artifacts);
nlohmann::json heightfield_json(const Heightfield& hf);

std::string base64_encode(std::string_view bytes);

}  // namespace geosketch
