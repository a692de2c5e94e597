#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "geosketch/hbrbf.hpp"
#include "geosketch/sketch.hpp"

namespace geosketch {

/// Regular sampling grid over the map bounds; node (i, j) sits at
/// min + (i·width/(nx−1), j·height/(ny−1)).
struct GridSpec {
    std::size_t nx = 128;
    std::size_t ny = 128;
    Bounds bounds;

    GridSpec() = default;
    /// Throws std::invalid_argument if nx or ny < 2 or bounds are degenerate.
    GridSpec(std::size_t nx, std::size_t ny, Bounds bounds);

    Point2 node(std::size_t i, std::size_t j) const;
    std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }
    std::size_t size() const { return nx * ny; }
};

/// Row-major samples z[j·nx + i].
struct Heightfield {
    GridSpec spec;
    std::vector<double> z;

    double at(std::size_t i, std::size_t j) const { return z[spec.index(i, j)]; }
    double min() const;
    double max() const;
};

/// Terrain height function: an HBRBF fit of the contours, or the datum when
/// the sketch has no contours.
class TerrainField {
public:
    struct Source {
        std::size_t contour_count = 0;
        double sample_spacing = 0.0;
        std::size_t sample_count = 0;
    };

    static TerrainField constant(double elevation);
    static TerrainField constant(double elevation, Source source);
    static TerrainField fitted(HbrbfInterpolant interp, Source source);

    double evaluate(Point2 p) const { return interp_ ? interp_->evaluate(p) : constant_; }
    Vector2 evaluate_gradient(Point2 p) const { return interp_ ? interp_->evaluate_gradient(p) : Vector2{}; }

    const std::optional<HbrbfInterpolant>& interpolant() const { return interp_; }
    const Source& source() const { return source_; }

private:
    std::optional<HbrbfInterpolant> interp_;
    double constant_ = 0.0;
    Source source_;
};

/// Samples at arc length 0, spacing, 2·spacing, ... The last vertex of an
/// open line is kept if it is more than spacing/2 past the previous sample;
/// closed lines include the wrap-around segment and never repeat the start.
std::vector<Point2> resample_polyline(const Polyline& line, double spacing);

/// Bounds diagonal / 200, at least 10 × the dedup radius.
double default_sample_spacing(const Bounds& bounds, const HbrbfConfig& config);

/// VALUE constraints at resampled contour points. Throws SingularSystem when
/// the fit fails or two contours of different elevation coincide.
TerrainField build_terrain(const MapSketch& sketch, double spacing, const HbrbfConfig& config);

enum class Execution { Serial, Parallel };

/// Evaluates a height function at every grid node. Output does not depend on `exec`.
Heightfield rasterize(const std::function<double(Point2)>& field, const GridSpec& spec,
                      Execution exec = Execution::Parallel);
Heightfield rasterize(const TerrainField& field, const GridSpec& spec, Execution exec = Execution::Parallel);
Heightfield rasterize(const HbrbfInterpolant& field, const GridSpec& spec, Execution exec = Execution::Parallel);

}  // namespace geosketch
