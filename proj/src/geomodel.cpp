#include "geosketch/geomodel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "geosketch/error.hpp"
#include "geosketch/json_format.hpp"

namespace geosketch {

namespace {

constexpr double kTolerance = 1e-9;

}  // namespace

std::vector<Constraint> horizon_constraints(const MapSketch& sketch, const std::string& horizon_id,
                                            const TerrainField& terrain, double spacing) {
    if (sketch.find_horizon(horizon_id) == nullptr) {
        throw UnknownHorizon(horizon_id);
    }
    std::vector<Constraint> constraints;
    for (const auto& b : sketch.boundaries) {
        if (b.horizon_id != horizon_id) {
            continue;
        }
        for (const Point2 p : resample_polyline(b.line, spacing)) {
            constraints.push_back(Constraint::value(p, terrain.evaluate(p)));
        }
    }
    for (const auto& d : sketch.dips) {
        if (d.horizon_id != horizon_id) {
            continue;
        }
        const double slope = std::tan(d.dip_deg * (M_PI / 180.0));
        constraints.push_back(Constraint::gradient(d.position, -slope * d.down_dip_direction()));
    }
    return constraints;
}

HorizonField build_horizon(const MapSketch& sketch, const std::string& horizon_id, const TerrainField& terrain,
                           double spacing, const HbrbfConfig& config) {
    const HorizonSpec* spec = sketch.find_horizon(horizon_id);
    if (spec == nullptr) {
        throw UnknownHorizon(horizon_id);
    }
    const auto constraints = horizon_constraints(sketch, horizon_id, terrain, spacing);
    if (std::none_of(constraints.begin(), constraints.end(), [](const Constraint& c) { return c.is_value(); })) {
        throw NoValueAnchor(horizon_id);
    }
    try {
        return {horizon_id, spec->kind, fit(constraints, config), 0};
    } catch (const SingularSystem& e) {
        throw SingularSystem("horizon '" + horizon_id + "': " + e.what());
    }
}

double default_model_base(const Heightfield& terrain) {
    const double lo = terrain.min();
    const double relief = terrain.max() - lo;
    return lo - std::max(0.25 * relief, 1.0);
}

std::vector<double> clip_column(const std::vector<double>& raw_oldest_first, double terrain) {
    std::vector<double> effective(raw_oldest_first.size());
    // Walking youngest to oldest, `ceiling` is min(T, every younger effective height).
    double ceiling = terrain;
    for (std::size_t k = raw_oldest_first.size(); k-- > 0;) {
        effective[k] = std::min(raw_oldest_first[k], ceiling);
        ceiling = effective[k];
    }
    return effective;
}

std::string cover_unit(const std::vector<std::string>& units_oldest_first,
                       const std::map<std::string, std::string>& horizon_to_unit) {
    std::set<std::string> owners;
    for (const auto& [h, u] : horizon_to_unit) {
        owners.insert(u);
    }
    for (auto it = units_oldest_first.rbegin(); it != units_oldest_first.rend(); ++it) {
        if (owners.count(*it) == 0) {
            return *it;
        }
    }
    throw MissingCoverUnit();
}

LayeredModel assemble_model(const Heightfield& terrain, const std::vector<Heightfield>& raw_horizons,
                            const std::vector<std::string>& horizon_ids, const std::vector<HorizonKind>& kinds,
                            const std::vector<std::string>& units_oldest_first,
                            const std::map<std::string, std::string>& horizon_to_unit,
                            std::optional<double> model_base) {
    if (raw_horizons.size() != horizon_ids.size() || kinds.size() != horizon_ids.size()) {
        throw std::invalid_argument("horizon ids, kinds and heightfields must be parallel");
    }
    const GridSpec& spec = terrain.spec;
    for (const auto& hf : raw_horizons) {
        if (hf.z.size() != spec.size()) {
            throw std::invalid_argument("horizon heightfield does not match the terrain grid");
        }
    }

    LayeredModel model;
    model.spec = spec;
    model.terrain = terrain;
    model.horizon_ids = horizon_ids;
    model.horizon_kinds = kinds;
    model.units = units_oldest_first;
    for (const auto& id : horizon_ids) {
        auto it = horizon_to_unit.find(id);
        if (it == horizon_to_unit.end()) {
            throw UnknownHorizon(id);
        }
        model.horizon_units.push_back(it->second);
    }
    model.cover_unit = cover_unit(units_oldest_first, horizon_to_unit);

    const double t_min = terrain.min();
    model.model_base = model_base.value_or(default_model_base(terrain));
    if (!(model.model_base < t_min)) {
        std::ostringstream msg;
        msg << "model base " << format_number(model.model_base) << " is not below the lowest terrain point "
            << format_number(t_min);
        throw BaseAboveTerrain(msg.str());
    }

    const std::size_t count = raw_horizons.size();
    model.effective_horizons.assign(count, Heightfield{spec, std::vector<double>(spec.size())});
    model.columns.resize(spec.size());

    std::vector<double> raw(count);
    for (std::size_t node = 0; node < spec.size(); ++node) {
        const double t = terrain.z[node];
        for (std::size_t k = 0; k < count; ++k) {
            raw[k] = raw_horizons[k].z[node];
        }
        const std::vector<double> eff = clip_column(raw, t);

        auto& column = model.columns[node];
        double bottom = model.model_base;
        auto push = [&](double top, const std::string& unit) {
            if (top - bottom > kTolerance) {
                column.push_back({bottom, top, unit});
                bottom = top;
            }
        };
        for (std::size_t k = 0; k < count; ++k) {
            model.effective_horizons[k].z[node] = eff[k];
            push(std::max(eff[k], bottom), model.horizon_units[k]);
        }
        push(t, model.cover_unit);
        // A dropped sliver at the top still has to reach the terrain.
        if (column.empty()) {
            column.push_back({model.model_base, t, model.cover_unit});
        } else {
            column.back().z_top = t;
        }
    }
    return model;
}

LayeredModel assemble_model(const TerrainField& terrain, const std::vector<HorizonField>& horizons,
                            const std::vector<std::string>& units_oldest_first,
                            const std::map<std::string, std::string>& horizon_to_unit, const GridSpec& spec,
                            std::optional<double> model_base) {
    const Heightfield t = rasterize(terrain, spec);
    std::vector<Heightfield> raw;
    std::vector<std::string> ids;
    std::vector<HorizonKind> kinds;
    for (const auto& h : horizons) {
        raw.push_back(rasterize(h.raw, spec));
        ids.push_back(h.horizon_id);
        kinds.push_back(h.kind);
    }
    return assemble_model(t, raw, ids, kinds, units_oldest_first, horizon_to_unit, model_base);
}

std::vector<Diagnostic> validate_model(const LayeredModel& model) {
    std::vector<Diagnostic> out;
    const GridSpec& spec = model.spec;
    if (model.terrain.z.size() != spec.size() || model.columns.size() != spec.size()) {
        out.push_back({Severity::Error, "terrain or column count does not match the grid", "/"});
        return out;
    }
    for (std::size_t k = 0; k < model.effective_horizons.size(); ++k) {
        if (model.effective_horizons[k].z.size() != spec.size()) {
            out.push_back({Severity::Error, "effective horizon '" + model.horizon_ids[k] + "' has the wrong size",
                           "/effective_horizons/" + std::to_string(k)});
            return out;
        }
    }
    const std::set<std::string> units(model.units.begin(), model.units.end());

    for (std::size_t j = 0; j < spec.ny; ++j) {
        for (std::size_t i = 0; i < spec.nx; ++i) {
            const std::size_t node = spec.index(i, j);
            const Point2 at = spec.node(i, j);
            const std::string where = "node(" + std::to_string(i) + "," + std::to_string(j) + ")";
            auto report = [&](const std::string& what) {
                out.push_back({Severity::Error,
                               what + " at " + where + " (x=" + format_number(at.x) + ", y=" + format_number(at.y) + ")",
                               "/nodes/" + std::to_string(i) + "," + std::to_string(j)});
            };
            const double t = model.terrain.z[node];
            if (!(model.model_base < t)) {
                report("model base is not below the terrain");
            }
            for (std::size_t k = 0; k < model.effective_horizons.size(); ++k) {
                const double e = model.effective_horizons[k].z[node];
                if (!(e <= t + kTolerance)) {
                    report("horizon '" + model.horizon_ids[k] + "' rises above the terrain");
                }
                if (k + 1 < model.effective_horizons.size() &&
                    !(e <= model.effective_horizons[k + 1].z[node] + kTolerance)) {
                    report("horizon '" + model.horizon_ids[k] + "' crosses above younger horizon '" +
                           model.horizon_ids[k + 1] + "'");
                }
            }

            const auto& column = model.columns[node];
            if (column.empty()) {
                report("empty column");
                continue;
            }
            double sum = 0.0;
            bool ok = std::abs(column.front().z_bottom - model.model_base) <= kTolerance &&
                      std::abs(column.back().z_top - t) <= kTolerance;
            for (std::size_t k = 0; k < column.size(); ++k) {
                const Interval& iv = column[k];
                ok = ok && iv.z_top > iv.z_bottom && units.count(iv.unit_id) != 0;
                if (k + 1 < column.size()) {
                    ok = ok && std::abs(iv.z_top - column[k + 1].z_bottom) <= kTolerance;
                }
                sum += iv.z_top - iv.z_bottom;
            }
            ok = ok && std::abs(sum - (t - model.model_base)) <= kTolerance;
            if (!ok) {
                report("column does not partition [base, terrain] into labelled intervals");
            }
        }
    }
    return out;
}

}  // namespace geosketch
