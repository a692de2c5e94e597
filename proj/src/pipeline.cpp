#include "geosketch/pipeline.hpp"

#include <chrono>
#include <sstream>
#include <stdexcept>

#include "geosketch/error.hpp"
#include "geosketch/geomodel.hpp"
#include "geosketch/json_format.hpp"
#include "geosketch/mesh.hpp"

namespace geosketch {

using nlohmann::json;

void BuildOptions::check() const {
    if (nx < 2 || nx > 2048 || ny < 2 || ny > 2048) {
        throw std::invalid_argument("grid must be within [2, 2048] nodes per axis");
    }
    if (spacing && !(*spacing > 0.0)) {
        throw std::invalid_argument("spacing must be positive");
    }
}

ValidationReport run_validate(const MapSketch& sketch) {
    ValidationReport report{validate_sketch(sketch), relative_ages(build_graph(sketch)), {}};
    if (const auto* order = std::get_if<AgeOrder>(&report.ages)) {
        report.horizon_order = horizon_age_order(*order, sketch.horizons);
    }
    return report;
}

namespace {

class StageTimer {
public:
    explicit StageTimer(std::map<std::string, double>& sink) : sink_(sink), start_(Clock::now()) {}
    void lap(const std::string& stage) {
        const auto now = Clock::now();
        sink_[stage] = std::chrono::duration<double, std::milli>(now - start_).count();
        start_ = now;
    }

private:
    using Clock = std::chrono::steady_clock;
    std::map<std::string, double>& sink_;
    Clock::time_point start_;
};

}  // namespace

BuildResult run_build(const MapSketch& sketch, const BuildOptions& options) {
    options.check();
    BuildResult result;
    StageTimer timer(result.timings_ms);

    const ValidationReport report = run_validate(sketch);
    result.diagnostics = report.diagnostics;
    if (const auto* cycle = std::get_if<CycleDiagnostic>(&report.ages)) {
        result.failure = BuildFailure{"CyclicRelations", "relations form a cycle: " + cycle->describe(), cycle->cycle};
        return result;
    }
    result.age_order = std::get<AgeOrder>(report.ages);
    timer.lap("validate");
    if (has_errors(result.diagnostics)) {
        return result;
    }

    try {
        const HbrbfConfig config = HbrbfConfig::for_bounds(sketch.bounds);
        const double spacing = options.spacing.value_or(default_sample_spacing(sketch.bounds, config));
        const TerrainField terrain = build_terrain(sketch, spacing, config);
        result.terrain_rows = terrain.interpolant() ? terrain.interpolant()->system_rows() : 0;
        timer.lap("terrain");

        std::vector<HorizonField> horizons;
        std::map<std::string, std::string> horizon_to_unit;
        for (const auto& id : report.horizon_order) {
            HorizonField h = build_horizon(sketch, id, terrain, spacing, config);
            h.age_rank = horizons.size();
            result.horizon_rows[id] = h.raw.system_rows();
            horizon_to_unit[id] = sketch.find_horizon(id)->below_unit;
            horizons.push_back(std::move(h));
        }
        timer.lap("horizons");

        const GridSpec grid(options.nx, options.ny, sketch.bounds);
        const LayeredModel model = assemble_model(terrain, horizons, result.age_order->units_oldest_first,
                                                  horizon_to_unit, grid, options.model_base);
        timer.lap("assemble");

        auto model_diags = validate_model(model);
        if (has_errors(model_diags)) {
            result.diagnostics.insert(result.diagnostics.end(), model_diags.begin(), model_diags.end());
            result.failure = BuildFailure{"InvalidModel", "assembled model violates its invariants", {}};
            return result;
        }

        result.artifacts["model.obj"] = obj_string(model_to_meshes(model));
        result.artifacts["terrain.json"] = dump_deterministic(heightfield_json(model.terrain));
        timer.lap("export");
    } catch (const SingularSystem& e) {
        result.failure = BuildFailure{"SingularSystem", e.what(), {}};
    } catch (const NoValueAnchor& e) {
        result.failure = BuildFailure{"NoValueAnchor", e.what(), {}};
    } catch (const BaseAboveTerrain& e) {
        result.failure = BuildFailure{"BaseAboveTerrain", e.what(), {}};
    } catch (const MissingCoverUnit& e) {
        result.failure = BuildFailure{"MissingCoverUnit", e.what(), {}};
    } catch (const EmptyConstraints& e) {
        result.failure = BuildFailure{"EmptyConstraints", e.what(), {}};
    }
    return result;
}

BuildRequest parse_build_request(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        throw SyntaxError(e.what(), e.byte);
    }
    if (!doc.is_object()) {
        throw SchemaError("expected an object", "");
    }
    BuildRequest request;
    bool have_sketch = false;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& key = it.key();
        const json& v = it.value();
        if (key == "sketch") {
            request.sketch = parse_sketch(v.dump());
            have_sketch = true;
        } else if (key == "grid") {
            if (v.is_number_unsigned()) {
                request.options.nx = request.options.ny = v.get<std::size_t>();
            } else if (v.is_array() && v.size() == 2 && v[0].is_number_unsigned() && v[1].is_number_unsigned()) {
                request.options.nx = v[0].get<std::size_t>();
                request.options.ny = v[1].get<std::size_t>();
            } else {
                throw SchemaError("grid must be N or [nx, ny] with non-negative integers", "/grid");
            }
        } else if (key == "spacing" || key == "model_base") {
            if (!v.is_number()) {
                throw SchemaError("expected a number", "/" + key);
            }
            (key == "spacing" ? request.options.spacing : request.options.model_base) = v.get<double>();
        } else {
            throw SchemaError("unknown field '" + key + "'", "/" + key);
        }
    }
    if (!have_sketch) {
        throw SchemaError("missing required field 'sketch'", "");
    }
    try {
        request.options.check();
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what(), "/grid");
    }
    return request;
}

json diagnostics_json(const std::vector<Diagnostic>& diagnostics) {
    json out = json::array();
    for (const auto& d : diagnostics) {
        out.push_back({{"severity", to_string(d.severity)}, {"message", d.message}, {"path", d.path}});
    }
    return out;
}

namespace {

json cycle_json(const CycleDiagnostic& cycle) {
    json edges = json::array();
    for (std::size_t k = 0; k < cycle.cycle.size(); ++k) {
        edges.push_back({{"younger", cycle.cycle[k]},
                         {"older", cycle.cycle[(k + 1) % cycle.cycle.size()]},
                         {"provenance", to_string(cycle.edges[k].provenance)},
                         {"kind", to_string(cycle.edges[k].kind)}});
    }
    return {{"units", cycle.cycle}, {"edges", edges}};
}

}  // namespace

json to_json(const ValidationReport& report) {
    json out;
    out["ok"] = report.ok();
    out["diagnostics"] = diagnostics_json(report.diagnostics);
    if (const auto* order = std::get_if<AgeOrder>(&report.ages)) {
        out["age_order"] = order->units_oldest_first;
        out["horizon_order"] = report.horizon_order;
    } else {
        out["cycle"] = cycle_json(std::get<CycleDiagnostic>(report.ages));
    }
    return out;
}

std::string to_text(const ValidationReport& report) {
    std::ostringstream out;
    for (const auto& d : report.diagnostics) {
        out << to_string(d.severity) << ' ' << d.path << ": " << d.message << '\n';
    }
    if (const auto* order = std::get_if<AgeOrder>(&report.ages)) {
        out << "age order (oldest first):";
        for (const auto& id : order->units_oldest_first) {
            out << ' ' << id;
        }
        out << '\n';
        if (!report.horizon_order.empty()) {
            out << "horizon order (oldest first):";
            for (const auto& id : report.horizon_order) {
                out << ' ' << id;
            }
            out << '\n';
        }
    } else {
        out << "ERROR relations form a cycle: " << std::get<CycleDiagnostic>(report.ages).describe() << '\n';
    }
    return out.str();
}

json to_json(const BuildResult& result, bool embed_artifacts) {
    json out;
    out["ok"] = result.ok();
    out["age_order"] = result.age_order ? json(result.age_order->units_oldest_first) : json(nullptr);
    out["diagnostics"] = diagnostics_json(result.diagnostics);
    if (result.failure) {
        out["failure"] = {{"type", result.failure->type}, {"message", result.failure->message}};
        if (!result.failure->cycle.empty()) {
            out["failure"]["cycle"] = result.failure->cycle;
        }
    }
    json artifacts = json::object();
    for (const auto& [name, bytes] : result.artifacts) {
        if (embed_artifacts) {
            artifacts[name] = base64_encode(bytes);
        } else {
            artifacts[name] = {{"bytes", bytes.size()}};
        }
    }
    out["artifacts"] = artifacts;
    out["timings_ms"] = result.timings_ms;
    out["system_rows"] = {{"terrain", result.terrain_rows}, {"horizons", result.horizon_rows}};
    return out;
}

json heightfield_json(const Heightfield& hf) {
    return {{"nx", hf.spec.nx},
            {"ny", hf.spec.ny},
            {"bounds",
             {{"min", {hf.spec.bounds.min.x, hf.spec.bounds.min.y}},
              {"max", {hf.spec.bounds.max.x, hf.spec.bounds.max.y}}}},
            {"z", hf.z}};
}

std::string base64_encode(std::string_view bytes) {
    static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const auto n = (static_cast<unsigned char>(bytes[i]) << 16) | (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                       static_cast<unsigned char>(bytes[i + 2]);
        out += kAlphabet[(n >> 18) & 63];
        out += kAlphabet[(n >> 12) & 63];
        out += kAlphabet[(n >> 6) & 63];
        out += kAlphabet[n & 63];
    }
    if (i < bytes.size()) {
        unsigned n = static_cast<unsigned char>(bytes[i]) << 16;
        if (i + 1 < bytes.size()) {
            n |= static_cast<unsigned char>(bytes[i + 1]) << 8;
        }
        out += kAlphabet[(n >> 18) & 63];
        out += kAlphabet[(n >> 12) & 63];
        out += i + 1 < bytes.size() ? kAlphabet[(n >> 6) & 63] : '=';
        out += '=';
    }
    return out;
}

}  // namespace geosketch
