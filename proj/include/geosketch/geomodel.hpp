#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geosketch/diagnostic.hpp"
#include "geosketch/hbrbf.hpp"
#include "geosketch/sketch.hpp"
#include "geosketch/terrain.hpp"

namespace geosketch {

/// Raw fitted height function of one horizon.
struct HorizonField {
    std::string horizon_id;
    HorizonKind kind = HorizonKind::Deposit;
    HbrbfInterpolant raw;
    std::size_t age_rank = 0;
};

/// Depth interval of one unit within a column.
struct Interval {
    double z_bottom = 0.0;
    double z_top = 0.0;
    std::string unit_id;

    friend bool operator==(const Interval&, const Interval&) = default;
};

struct LayeredModel {
    GridSpec spec;
    double model_base = 0.0;
    Heightfield terrain;
    /// Oldest-first, parallel to effective_horizons.
    std::vector<std::string> horizon_ids;
    std::vector<HorizonKind> horizon_kinds;
    std::vector<std::string> horizon_units;  // below_unit of each horizon
    std::vector<Heightfield> effective_horizons;
    std::vector<std::vector<Interval>> columns;  // per grid node, bottom-up
    std::string cover_unit;
    /// Every unit id of the sketch (valid interval labels).
    std::vector<std::string> units;
};

/// Fits one horizon: outcrop samples pinned to the terrain as values, dip
/// symbols as gradients g = −tan(dip)·down-dip. Throws NoValueAnchor,
/// UnknownHorizon or SingularSystem.
HorizonField build_horizon(const MapSketch& sketch, const std::string& horizon_id, const TerrainField& terrain,
                           double spacing, const HbrbfConfig& config);

/// Constraints build_horizon fits, exposed for inspection and tests.
std::vector<Constraint> horizon_constraints(const MapSketch& sketch, const std::string& horizon_id,
                                            const TerrainField& terrain, double spacing);

/// min terrain − max(0.25 × relief, 1 m).
double default_model_base(const Heightfield& terrain);

/// Effective heights from raw heights at one node (oldest-first): every
/// horizon is clipped by the terrain and by all younger horizons.
std::vector<double> clip_column(const std::vector<double>& raw_oldest_first, double terrain);

/// Youngest unit in age order that is nobody's below_unit. Throws MissingCoverUnit.
std::string cover_unit(const std::vector<std::string>& units_oldest_first,
                       const std::map<std::string, std::string>& horizon_to_unit);

/// Applies the clipping rules at every node and stacks the columns.
/// `horizons` must be oldest-first. Throws BaseAboveTerrain, MissingCoverUnit.
LayeredModel assemble_model(const TerrainField& terrain, const std::vector<HorizonField>& horizons,
                            const std::vector<std::string>& units_oldest_first,
                            const std::map<std::string, std::string>& horizon_to_unit, const GridSpec& spec,
                            std::optional<double> model_base = std::nullopt);

/// Same, from pre-sampled raw heightfields (one per horizon, oldest-first).
LayeredModel assemble_model(const Heightfield& terrain, const std::vector<Heightfield>& raw_horizons,
                            const std::vector<std::string>& horizon_ids, const std::vector<HorizonKind>& kinds,
                            const std::vector<std::string>& units_oldest_first,
                            const std::map<std::string, std::string>& horizon_to_unit,
                            std::optional<double> model_base = std::nullopt);

/// Numerically re-checks every LayeredModel invariant (tolerance 1e-9 m).
std::vector<Diagnostic> validate_model(const LayeredModel& model);

}  // namespace geosketch
