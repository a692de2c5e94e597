#include "geosketch/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <set>

#include <json.hpp>

#include "geosketch/error.hpp"
#include "geosketch/json_format.hpp"

namespace geosketch {

using nlohmann::json;

const RockUnit* MapSketch::find_unit(std::string_view id) const {
    for (const auto& u : units) {
        if (u.id == id) {
            return &u;
        }
    }
    return nullptr;
}

const HorizonSpec* MapSketch::find_horizon(std::string_view id) const {
    for (const auto& h : horizons) {
        if (h.id == id) {
            return &h;
        }
    }
    return nullptr;
}

const char* to_string(HorizonKind kind) { return kind == HorizonKind::Deposit ? "DEPOSIT" : "ERODE"; }
const char* to_string(RelationKind kind) { return kind == RelationKind::Above ? "ABOVE" : "CUTS"; }

namespace {

std::string child_path(const std::string& path, std::string_view key) {
    return path + "/" + std::string(key);
}

std::string child_path(const std::string& path, std::size_t index) {
    return path + "/" + std::to_string(index);
}

/// Checked access to one JSON object; every accessor records the key so
/// unknown fields can be rejected afterwards.
class ObjectReader {
public:
    ObjectReader(const json& value, std::string path) : value_(value), path_(std::move(path)) {
        if (!value_.is_object()) {
            throw SchemaError("expected an object", path_);
        }
    }

    const json* optional(std::string_view key) {
        known_.emplace(key);
        auto it = value_.find(std::string(key));
        return it == value_.end() ? nullptr : &*it;
    }

    const json& required(std::string_view key) {
        const json* v = optional(key);
        if (v == nullptr) {
            throw SchemaError("missing required field '" + std::string(key) + "'", path_);
        }
        return *v;
    }

    double number(std::string_view key) { return as_number(required(key), child_path(path_, key)); }

    std::string string(std::string_view key) { return as_string(required(key), child_path(path_, key)); }

    bool boolean(std::string_view key, bool fallback) {
        const json* v = optional(key);
        if (v == nullptr) {
            return fallback;
        }
        if (!v->is_boolean()) {
            throw SchemaError("expected a boolean", child_path(path_, key));
        }
        return v->get<bool>();
    }

    const json& array(std::string_view key) {
        const json& v = required(key);
        if (!v.is_array()) {
            throw SchemaError("expected an array", child_path(path_, key));
        }
        return v;
    }

    /// Missing list fields read as empty.
    const json* optional_array(std::string_view key) {
        const json* v = optional(key);
        if (v != nullptr && !v->is_array()) {
            throw SchemaError("expected an array", child_path(path_, key));
        }
        return v;
    }

    void reject_unknown() const {
        for (auto it = value_.begin(); it != value_.end(); ++it) {
            if (known_.count(it.key()) == 0) {
                throw SchemaError("unknown field '" + it.key() + "'", child_path(path_, it.key()));
            }
        }
    }

    const std::string& path() const { return path_; }

    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) {
            throw SchemaError("expected a number", path);
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            throw SchemaError("number is not finite", path);
        }
        return d;
    }

    static std::string as_string(const json& v, const std::string& path) {
        if (!v.is_string()) {
            throw SchemaError("expected a string", path);
        }
        return v.get<std::string>();
    }

private:
    const json& value_;
    std::string path_;
    std::set<std::string, std::less<>> known_;
};

Point2 read_point(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) {
        throw SchemaError("expected a coordinate pair [x, y]", path);
    }
    return {ObjectReader::as_number(v[0], child_path(path, 0)),
            ObjectReader::as_number(v[1], child_path(path, 1))};
}

Polyline read_polyline(ObjectReader& obj) {
    Polyline line;
    const json& points = obj.array("points");
    const std::string points_path = child_path(obj.path(), "points");
    if (points.size() < 2) {
        throw SchemaError("a polyline needs at least 2 points", points_path);
    }
    line.points.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        line.points.push_back(read_point(points[i], child_path(points_path, i)));
    }
    line.closed = obj.boolean("closed", false);
    return line;
}

template <typename Fn>
void for_each_item(ObjectReader& obj, std::string_view key, Fn&& fn) {
    const json* items = obj.optional_array(key);
    if (items == nullptr) {
        return;
    }
    const std::string base = child_path(obj.path(), key);
    for (std::size_t i = 0; i < items->size(); ++i) {
        ObjectReader item((*items)[i], child_path(base, i));
        fn(item);
        item.reject_unknown();
    }
}

HorizonKind parse_horizon_kind(const std::string& text, const std::string& path) {
    if (text == "DEPOSIT") {
        return HorizonKind::Deposit;
    }
    if (text == "ERODE") {
        return HorizonKind::Erode;
    }
    throw SchemaError("horizon kind must be DEPOSIT or ERODE", path);
}

RelationKind parse_relation_kind(const std::string& text, const std::string& path) {
    if (text == "ABOVE") {
        return RelationKind::Above;
    }
    if (text == "CUTS") {
        return RelationKind::Cuts;
    }
    throw SchemaError("relation kind must be ABOVE or CUTS", path);
}

void check_unit(const MapSketch& sketch, const std::string& id, const std::string& path) {
    if (sketch.find_unit(id) == nullptr) {
        throw ReferenceError("unknown unit '" + id + "' at " + path, id, path);
    }
}

void check_horizon(const MapSketch& sketch, const std::string& id, const std::string& path) {
    if (sketch.find_horizon(id) == nullptr) {
        throw ReferenceError("unknown horizon '" + id + "' at " + path, id, path);
    }
}

void check_resolved(const MapSketch& sketch) {
    for (std::size_t i = 0; i < sketch.horizons.size(); ++i) {
        check_unit(sketch, sketch.horizons[i].below_unit, "/horizons/" + std::to_string(i) + "/below_unit");
    }
    for (std::size_t i = 0; i < sketch.boundaries.size(); ++i) {
        const auto& b = sketch.boundaries[i];
        const std::string base = "/boundaries/" + std::to_string(i);
        check_horizon(sketch, b.horizon_id, base + "/horizon");
        check_unit(sketch, b.older_unit, base + "/older_unit");
        check_unit(sketch, b.younger_unit, base + "/younger_unit");
    }
    for (std::size_t i = 0; i < sketch.dips.size(); ++i) {
        check_horizon(sketch, sketch.dips[i].horizon_id, "/dips/" + std::to_string(i) + "/horizon");
    }
    for (std::size_t i = 0; i < sketch.relations.size(); ++i) {
        const auto& r = sketch.relations[i];
        const std::string base = "/relations/" + std::to_string(i);
        check_unit(sketch, r.younger, base + "/younger");
        check_unit(sketch, r.older, base + "/older");
    }
}

}  // namespace

MapSketch parse_sketch(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        throw SyntaxError(e.what(), e.byte);
    }

    MapSketch sketch;
    ObjectReader root(doc, "");

    if (const json* version = root.optional("version")) {
        if (!version->is_number_integer() || version->get<long long>() != 1) {
            throw SchemaError("unsupported version (expected 1)", "/version");
        }
    }

    {
        ObjectReader bounds(root.required("bounds"), "/bounds");
        sketch.bounds.min = read_point(bounds.required("min"), "/bounds/min");
        sketch.bounds.max = read_point(bounds.required("max"), "/bounds/max");
        bounds.reject_unknown();
        if (!(sketch.bounds.width() > 0.0) || !(sketch.bounds.height() > 0.0)) {
            throw SchemaError("bounds must have positive width and height", "/bounds");
        }
    }
    sketch.datum_elevation = root.number("datum_elevation");

    std::set<std::string, std::less<>> unit_ids;
    for_each_item(root, "units", [&](ObjectReader& item) {
        RockUnit unit;
        unit.id = item.string("id");
        if (unit.id.empty()) {
            throw SchemaError("unit id must be non-empty", child_path(item.path(), "id"));
        }
        if (!unit_ids.insert(unit.id).second) {
            throw SchemaError("duplicate unit id '" + unit.id + "'", child_path(item.path(), "id"));
        }
        unit.name = item.optional("name") != nullptr ? item.string("name") : unit.id;
        if (const json* color = item.optional("color")) {
            const std::string color_path = child_path(item.path(), "color");
            if (!color->is_array() || color->size() != 3) {
                throw SchemaError("color must be [r, g, b]", color_path);
            }
            for (std::size_t c = 0; c < 3; ++c) {
                const json& channel = (*color)[c];
                if (!channel.is_number_integer() || channel.get<long long>() < 0 || channel.get<long long>() > 255) {
                    throw SchemaError("color channel must be an integer in [0, 255]", child_path(color_path, c));
                }
                unit.color[c] = static_cast<std::uint8_t>(channel.get<long long>());
            }
        }
        sketch.units.push_back(std::move(unit));
    });

    std::set<std::string, std::less<>> horizon_ids;
    for_each_item(root, "horizons", [&](ObjectReader& item) {
        HorizonSpec h;
        h.id = item.string("id");
        if (h.id.empty()) {
            throw SchemaError("horizon id must be non-empty", child_path(item.path(), "id"));
        }
        if (!horizon_ids.insert(h.id).second) {
            throw SchemaError("duplicate horizon id '" + h.id + "'", child_path(item.path(), "id"));
        }
        h.kind = parse_horizon_kind(item.string("kind"), child_path(item.path(), "kind"));
        h.below_unit = item.string("below_unit");
        sketch.horizons.push_back(std::move(h));
    });

    for_each_item(root, "contours", [&](ObjectReader& item) {
        ContourLine c;
        c.elevation = item.number("elevation");
        c.line = read_polyline(item);
        sketch.contours.push_back(std::move(c));
    });

    for_each_item(root, "boundaries", [&](ObjectReader& item) {
        BoundaryLine b;
        b.horizon_id = item.string("horizon");
        b.older_unit = item.string("older_unit");
        b.younger_unit = item.string("younger_unit");
        if (b.older_unit == b.younger_unit) {
            throw SchemaError("older_unit and younger_unit must differ", item.path());
        }
        b.line = read_polyline(item);
        sketch.boundaries.push_back(std::move(b));
    });

    for_each_item(root, "dips", [&](ObjectReader& item) {
        DipSymbol d;
        d.horizon_id = item.string("horizon");
        d.position = read_point(item.required("position"), child_path(item.path(), "position"));
        d.strike_azimuth_deg = item.number("strike_azimuth_deg");
        if (d.strike_azimuth_deg < 0.0 || d.strike_azimuth_deg >= 360.0) {
            throw SchemaError("strike azimuth must be in [0, 360)", child_path(item.path(), "strike_azimuth_deg"));
        }
        d.dip_deg = item.number("dip_deg");
        if (d.dip_deg < 0.0 || d.dip_deg >= 90.0) {
            throw SchemaError("dip must be in [0, 90)", child_path(item.path(), "dip_deg"));
        }
        sketch.dips.push_back(std::move(d));
    });

    for_each_item(root, "relations", [&](ObjectReader& item) {
        RelationAnnotation r;
        r.younger = item.string("younger");
        r.older = item.string("older");
        if (r.younger == r.older) {
            throw SchemaError("a unit cannot be related to itself", item.path());
        }
        r.kind = parse_relation_kind(item.string("kind"), child_path(item.path(), "kind"));
        sketch.relations.push_back(std::move(r));
    });

    root.reject_unknown();
    check_resolved(sketch);
    return sketch;
}

namespace {

json point_json(Point2 p) { return json::array({p.x, p.y}); }

json points_json(const Polyline& line) {
    json pts = json::array();
    for (const auto& p : line.points) {
        pts.push_back(point_json(p));
    }
    return pts;
}

}  // namespace

std::string serialize_sketch(const MapSketch& sketch) {
    json doc;
    doc["version"] = 1;
    doc["bounds"] = {{"min", point_json(sketch.bounds.min)}, {"max", point_json(sketch.bounds.max)}};
    doc["datum_elevation"] = sketch.datum_elevation;

    doc["units"] = json::array();
    for (const auto& u : sketch.units) {
        doc["units"].push_back({{"id", u.id}, {"name", u.name}, {"color", {u.color[0], u.color[1], u.color[2]}}});
    }
    doc["horizons"] = json::array();
    for (const auto& h : sketch.horizons) {
        doc["horizons"].push_back({{"id", h.id}, {"kind", to_string(h.kind)}, {"below_unit", h.below_unit}});
    }
    doc["contours"] = json::array();
    for (const auto& c : sketch.contours) {
        doc["contours"].push_back(
            {{"elevation", c.elevation}, {"points", points_json(c.line)}, {"closed", c.line.closed}});
    }
    doc["boundaries"] = json::array();
    for (const auto& b : sketch.boundaries) {
        doc["boundaries"].push_back({{"horizon", b.horizon_id},
                                     {"older_unit", b.older_unit},
                                     {"younger_unit", b.younger_unit},
                                     {"points", points_json(b.line)},
                                     {"closed", b.line.closed}});
    }
    doc["dips"] = json::array();
    for (const auto& d : sketch.dips) {
        doc["dips"].push_back({{"horizon", d.horizon_id},
                               {"position", point_json(d.position)},
                               {"strike_azimuth_deg", d.strike_azimuth_deg},
                               {"dip_deg", d.dip_deg}});
    }
    doc["relations"] = json::array();
    for (const auto& r : sketch.relations) {
        doc["relations"].push_back({{"younger", r.younger}, {"older", r.older}, {"kind", to_string(r.kind)}});
    }
    return dump_deterministic(doc);
}

namespace {

void check_polyline(const Polyline& line, const Bounds& bounds, const std::string& path, const std::string& what,
                    std::vector<Diagnostic>& out) {
    for (std::size_t i = 0; i < line.points.size(); ++i) {
        if (!bounds.contains(line.points[i])) {
            out.push_back({Severity::Error, what + " point " + std::to_string(i) + " lies outside the map bounds",
                           path + "/points/" + std::to_string(i)});
            break;
        }
    }
    const std::size_t n = line.points.size();
    const std::size_t segments = line.closed ? n : n - 1;
    for (std::size_t i = 0; i < segments; ++i) {
        const std::size_t j = (i + 1) % n;
        if (distance(line.points[i], line.points[j]) <= 1e-9) {
            out.push_back({Severity::Error,
                           what + " has coincident consecutive points " + std::to_string(i) + " and " +
                               std::to_string(j),
                           path + "/points/" + std::to_string(j)});
            break;
        }
    }
}

double distance_to_polyline(Point2 p, const Polyline& line) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = line.points.size();
    const std::size_t segments = line.closed ? n : n - 1;
    for (std::size_t i = 0; i < segments; ++i) {
        best = std::min(best, point_segment_distance(p, line.points[i], line.points[(i + 1) % n]));
    }
    return best;
}

}  // namespace

std::vector<Diagnostic> validate_sketch(const MapSketch& sketch, const ValidationOptions& options) {
    std::vector<Diagnostic> out;
    const double max_dip_distance = options.max_dip_distance.value_or(0.05 * sketch.bounds.diagonal());

    for (std::size_t i = 0; i < sketch.contours.size(); ++i) {
        check_polyline(sketch.contours[i].line, sketch.bounds, "/contours/" + std::to_string(i),
                       "contour " + std::to_string(i), out);
    }
    for (std::size_t i = 0; i < sketch.boundaries.size(); ++i) {
        check_polyline(sketch.boundaries[i].line, sketch.bounds, "/boundaries/" + std::to_string(i),
                       "boundary " + std::to_string(i), out);
    }

    for (std::size_t i = 0; i < sketch.dips.size(); ++i) {
        const DipSymbol& dip = sketch.dips[i];
        const std::string path = "/dips/" + std::to_string(i);
        if (!sketch.bounds.contains(dip.position)) {
            out.push_back({Severity::Error, "dip symbol " + std::to_string(i) + " lies outside the map bounds", path});
        }
        if (dip.dip_deg > options.steep_dip_warning_deg) {
            out.push_back({Severity::Warning,
                           "dip symbol " + std::to_string(i) + " is steeper than " +
                               format_number(options.steep_dip_warning_deg) + " degrees; the surface gradient will be extreme",
                           path + "/dip_deg"});
        }
        double nearest = std::numeric_limits<double>::infinity();
        bool has_boundary = false;
        for (const auto& b : sketch.boundaries) {
            if (b.horizon_id == dip.horizon_id) {
                has_boundary = true;
                nearest = std::min(nearest, distance_to_polyline(dip.position, b.line));
            }
        }
        if (has_boundary && nearest > max_dip_distance) {
            out.push_back({Severity::Warning,
                           "dip symbol " + std::to_string(i) + " is " + format_number(nearest) +
                               " m from the nearest boundary of horizon '" + dip.horizon_id + "' (limit " +
                               format_number(max_dip_distance) + " m)",
                           path + "/position"});
        }
    }

    for (std::size_t i = 0; i < sketch.horizons.size(); ++i) {
        const auto& h = sketch.horizons[i];
        const bool anchored = std::any_of(sketch.boundaries.begin(), sketch.boundaries.end(),
                                          [&](const BoundaryLine& b) { return b.horizon_id == h.id; });
        if (!anchored) {
            out.push_back({Severity::Error,
                           "horizon '" + h.id + "' has no boundary line, so its height cannot be determined",
                           "/horizons/" + std::to_string(i)});
        }
    }
    return out;
}

}  // namespace geosketch
