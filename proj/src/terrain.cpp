#include "geosketch/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "geosketch/error.hpp"
#include "geosketch/json_format.hpp"

namespace geosketch {

GridSpec::GridSpec(std::size_t nx_, std::size_t ny_, Bounds bounds_) : nx(nx_), ny(ny_), bounds(bounds_) {
    if (nx < 2 || ny < 2) {
        throw std::invalid_argument("grid needs at least 2 nodes per axis");
    }
    if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0)) {
        throw std::invalid_argument("grid bounds are degenerate");
    }
}

Point2 GridSpec::node(std::size_t i, std::size_t j) const {
    return {bounds.min.x + static_cast<double>(i) * (bounds.width() / static_cast<double>(nx - 1)),
            bounds.min.y + static_cast<double>(j) * (bounds.height() / static_cast<double>(ny - 1))};
}

double Heightfield::min() const { return *std::min_element(z.begin(), z.end()); }
double Heightfield::max() const { return *std::max_element(z.begin(), z.end()); }

TerrainField TerrainField::constant(double elevation) { return constant(elevation, Source{}); }

TerrainField TerrainField::constant(double elevation, Source source) {
    TerrainField t;
    t.constant_ = elevation;
    t.source_ = source;
    return t;
}

TerrainField TerrainField::fitted(HbrbfInterpolant interp, Source source) {
    TerrainField t;
    t.interp_ = std::move(interp);
    t.source_ = source;
    return t;
}

std::vector<Point2> resample_polyline(const Polyline& line, double spacing) {
    if (!(spacing > 0.0)) {
        throw std::invalid_argument("resample spacing must be positive");
    }
    std::vector<Point2> out;
    const auto& pts = line.points;
    if (pts.empty()) {
        return out;
    }
    out.push_back(pts.front());
    const std::size_t n = pts.size();
    const std::size_t segments = line.closed ? n : n - 1;

    double total = 0.0;
    for (std::size_t s = 0; s < segments; ++s) {
        total += distance(pts[s], pts[(s + 1) % n]);
    }

    // Walk the segments, emitting the sample at k·spacing for k = 1, 2, ...
    std::size_t k = 1;
    double seg_start = 0.0;
    for (std::size_t s = 0; s < segments; ++s) {
        const Point2 a = pts[s];
        const Point2 b = pts[(s + 1) % n];
        const double len = distance(a, b);
        const double seg_end = seg_start + len;
        while (static_cast<double>(k) * spacing <= seg_end) {
            const double target = static_cast<double>(k) * spacing;
            // The closing sample of a closed line coincides with the start.
            if (line.closed && target >= total - 1e-9 * std::max(1.0, total)) {
                break;
            }
            const double t = len > 0.0 ? (target - seg_start) / len : 0.0;
            out.push_back(a + t * (b - a));
            ++k;
        }
        seg_start = seg_end;
    }

    if (!line.closed) {
        const double last_sample = static_cast<double>(k - 1) * spacing;
        // Lines shorter than the spacing still keep both endpoints.
        if (total - last_sample > 0.5 * spacing || (out.size() == 1 && total > 0.0)) {
            out.push_back(pts.back());
        }
    }
    return out;
}

double default_sample_spacing(const Bounds& bounds, const HbrbfConfig& config) {
    return std::max(bounds.diagonal() / 200.0, 10.0 * config.dedup_radius);
}

TerrainField build_terrain(const MapSketch& sketch, double spacing, const HbrbfConfig& config) {
    if (sketch.contours.empty()) {
        return TerrainField::constant(sketch.datum_elevation, TerrainField::Source{0, spacing, 0});
    }
    std::vector<Constraint> constraints;
    std::vector<std::size_t> owner;
    for (std::size_t c = 0; c < sketch.contours.size(); ++c) {
        for (const Point2 p : resample_polyline(sketch.contours[c].line, spacing)) {
            constraints.push_back(Constraint::value(p, sketch.contours[c].elevation));
            owner.push_back(c);
        }
    }

    // Coincident samples from contours at different elevations would be
    // silently averaged by deduplication; report them instead.
    const double tol = std::max(config.dedup_radius, 1e-9 * sketch.bounds.diagonal());
    for (std::size_t a = 0; a < constraints.size(); ++a) {
        for (std::size_t b = a + 1; b < constraints.size(); ++b) {
            if (owner[a] == owner[b] ||
                sketch.contours[owner[a]].elevation == sketch.contours[owner[b]].elevation) {
                continue;
            }
            if (distance(constraints[a].location, constraints[b].location) <= tol) {
                std::ostringstream msg;
                msg << "contours " << owner[a] << " (elevation " << format_number(sketch.contours[owner[a]].elevation)
                    << ") and " << owner[b] << " (elevation " << format_number(sketch.contours[owner[b]].elevation)
                    << ") share geometry near (" << format_number(constraints[a].location.x) << ", "
                    << format_number(constraints[a].location.y) << ")";
                throw SingularSystem(msg.str());
            }
        }
    }

    // Canonical order, so the fit does not depend on how contours were listed.
    std::sort(constraints.begin(), constraints.end(), [](const Constraint& a, const Constraint& b) {
        const double va = std::get<Constraint::Value>(a.data).value;
        const double vb = std::get<Constraint::Value>(b.data).value;
        return std::tie(a.location.x, a.location.y, va) < std::tie(b.location.x, b.location.y, vb);
    });

    const TerrainField::Source source{sketch.contours.size(), spacing, constraints.size()};
    try {
        return TerrainField::fitted(fit(constraints, config), source);
    } catch (const SingularSystem& e) {
        throw SingularSystem(std::string("terrain: ") + e.what());
    }
}

Heightfield rasterize(const std::function<double(Point2)>& field, const GridSpec& spec, Execution exec) {
    Heightfield hf{spec, std::vector<double>(spec.size())};
    auto fill_rows = [&](std::size_t j0, std::size_t j1) {
        for (std::size_t j = j0; j < j1; ++j) {
            for (std::size_t i = 0; i < spec.nx; ++i) {
                hf.z[spec.index(i, j)] = field(spec.node(i, j));
            }
        }
    };
    const std::size_t workers =
        exec == Execution::Serial ? 1 : std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, spec.ny);
    if (workers <= 1) {
        fill_rows(0, spec.ny);
        return hf;
    }
    std::vector<std::thread> threads;
    const std::size_t chunk = (spec.ny + workers - 1) / workers;
    for (std::size_t j0 = 0; j0 < spec.ny; j0 += chunk) {
        threads.emplace_back(fill_rows, j0, std::min(spec.ny, j0 + chunk));
    }
    for (auto& t : threads) {
        t.join();
    }
    return hf;
}

Heightfield rasterize(const TerrainField& field, const GridSpec& spec, Execution exec) {
    return rasterize([&field](Point2 p) { return field.evaluate(p); }, spec, exec);
}

Heightfield rasterize(const HbrbfInterpolant& field, const GridSpec& spec, Execution exec) {
    return rasterize([&field](Point2 p) { return field.evaluate(p); }, spec, exec);
}

}  // namespace geosketch
