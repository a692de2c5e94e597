#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geosketch/diagnostic.hpp"
#include "geosketch/geometry.hpp"

namespace geosketch {

/// Ordered vertex list. Closed polylines have an implicit last-to-first segment.
struct Polyline {
    std::vector<Point2> points;
    bool closed = false;

    friend bool operator==(const Polyline&, const Polyline&) = default;
};

struct ContourLine {
    Polyline line;
    double elevation = 0.0;

    friend bool operator==(const ContourLine&, const ContourLine&) = default;
};

struct RockUnit {
    std::string id;
    std::string name;
    std::array<std::uint8_t, 3> color{128, 128, 128};

    friend bool operator==(const RockUnit&, const RockUnit&) = default;
};

enum class HorizonKind { Deposit, Erode };

/// A geological contact surface: the top of `below_unit`.
struct HorizonSpec {
    std::string id;
    HorizonKind kind = HorizonKind::Deposit;
    std::string below_unit;

    friend bool operator==(const HorizonSpec&, const HorizonSpec&) = default;
};

/// Outcrop trace of a horizon, separating an older from a younger unit on the map.
struct BoundaryLine {
    Polyline line;
    std::string older_unit;
    std::string younger_unit;
    std::string horizon_id;

    friend bool operator==(const BoundaryLine&, const BoundaryLine&) = default;
};

/// Strike/dip symbol. Angles are degrees as drawn on the map; the down-dip
/// direction is 90 degrees clockwise of strike.
struct DipSymbol {
    Point2 position;
    double strike_azimuth_deg = 0.0;
    double dip_deg = 0.0;
    std::string horizon_id;

    Vector2 down_dip_direction() const { return azimuth_direction(strike_azimuth_deg + 90.0); }

    friend bool operator==(const DipSymbol&, const DipSymbol&) = default;
};

enum class RelationKind { Above, Cuts };

struct RelationAnnotation {
    std::string younger;
    std::string older;
    RelationKind kind = RelationKind::Above;

    friend bool operator==(const RelationAnnotation&, const RelationAnnotation&) = default;
};

struct MapSketch {
    Bounds bounds;
    double datum_elevation = 0.0;
    std::vector<ContourLine> contours;
    std::vector<RockUnit> units;
    std::vector<HorizonSpec> horizons;
    std::vector<BoundaryLine> boundaries;
    std::vector<DipSymbol> dips;
    std::vector<RelationAnnotation> relations;

    const RockUnit* find_unit(std::string_view id) const;
    const HorizonSpec* find_horizon(std::string_view id) const;

    friend bool operator==(const MapSketch&, const MapSketch&) = default;
};

const char* to_string(HorizonKind kind);
const char* to_string(RelationKind kind);

/// Parses the sketch JSON format. Throws SyntaxError, SchemaError or ReferenceError.
MapSketch parse_sketch(std::string_view json_text);

/// Deterministic JSON: sorted keys, numbers with 9 significant digits.
std::string serialize_sketch(const MapSketch& sketch);

struct ValidationOptions {
    /// Dip symbols farther than this from every boundary of their horizon are
    /// flagged. Defaults to 5% of the bounds diagonal.
    std::optional<double> max_dip_distance;
    /// Dips steeper than this produce extreme gradients and are flagged.
    double steep_dip_warning_deg = 75.0;
};

/// Geometric and buildability checks on a parsed sketch. Empty result means buildable.
std::vector<Diagnostic> validate_sketch(const MapSketch& sketch, const ValidationOptions& options = {});

}  // namespace geosketch
