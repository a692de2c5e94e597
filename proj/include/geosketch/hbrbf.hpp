#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "geosketch/geometry.hpp"

namespace geosketch {

/// Hermite-Birkhoff data at one location: a height, a full gradient, or a
/// derivative along one direction (possibly without a co-located height).
struct Constraint {
    struct Value {
        double value;
    };
    struct Gradient {
        Vector2 gradient;
    };
    struct Directional {
        Vector2 direction;  // unit norm
        double derivative;
    };

    Point2 location;
    std::variant<Value, Gradient, Directional> data;

    static Constraint value(Point2 at, double v) { return {at, Value{v}}; }
    static Constraint gradient(Point2 at, Vector2 g) { return {at, Gradient{g}}; }
    /// Throws std::invalid_argument unless ‖direction‖ = 1 (±1e-12).
    static Constraint directional(Point2 at, Vector2 direction, double derivative);

    bool is_value() const { return std::holds_alternative<Value>(data); }
    bool is_gradient() const { return std::holds_alternative<Gradient>(data); }
    bool is_directional() const { return std::holds_alternative<Directional>(data); }
    /// Number of scalar equations this constraint contributes (1 or 2).
    std::size_t rows() const { return is_gradient() ? 2 : 1; }
};

enum class Kernel { Triharmonic };

struct HbrbfConfig {
    Kernel kernel = Kernel::Triharmonic;
    int poly_degree = 1;              // 0 or 1
    double regularization = 0.0;     // added to the RBF block diagonal (normalized coordinates)
    double dedup_radius = 0.0;        // same-kind constraints closer than this are merged

    /// Defaults scaled to a map extent: dedup radius 1e-6 of the diagonal.
    static HbrbfConfig for_bounds(const Bounds& bounds);
};

/// Affine map from map coordinates into the normalized frame used for assembly.
struct CoordinateFrame {
    Point2 origin;
    double scale = 1.0;  // map meters per normalized unit

    Point2 to_local(Point2 p) const { return {(p.x - origin.x) / scale, (p.y - origin.y) / scale}; }
    Point2 to_map(Point2 p) const { return {origin.x + p.x * scale, origin.y + p.y * scale}; }
};

/// Symmetric saddle-point system [K + λI, P; Pᵀ, 0] in normalized coordinates.
struct LinearSystem {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd rhs;
    /// Index of the (deduplicated) constraint owning each RBF row; -1 for polynomial rows.
    std::vector<std::ptrdiff_t> row_constraint;
    std::size_t rbf_rows = 0;
    std::size_t poly_rows = 0;
};

/// Fitted scalar height field s(x, y). Immutable; evaluation is re-entrant.
class HbrbfInterpolant {
public:
    double evaluate(Point2 p) const;
    Vector2 evaluate_gradient(Point2 p) const;

    const HbrbfConfig& config() const { return config_; }
    const CoordinateFrame& frame() const { return frame_; }
    /// Centers after deduplication, in map coordinates.
    const std::vector<Constraint>& centers() const { return centers_; }
    /// One weight per RBF row: scalar for VALUE/DIRECTIONAL, two for GRADIENT.
    const Eigen::VectorXd& coefficients() const { return coefficients_; }
    /// c0 (degree 0) or c0 + c1·x + c2·y (degree 1), in normalized coordinates.
    const Eigen::VectorXd& poly_coefficients() const { return poly_; }
    std::size_t system_rows() const { return static_cast<std::size_t>(coefficients_.size() + poly_.size()); }

private:
    friend HbrbfInterpolant fit(const std::vector<Constraint>&, const HbrbfConfig&);

    HbrbfConfig config_;
    CoordinateFrame frame_;
    std::vector<Constraint> centers_;
    std::vector<Point2> local_centers_;
    Eigen::VectorXd coefficients_;
    Eigen::VectorXd poly_;
};

/// Merges same-kind constraints within config.dedup_radius by averaging.
/// Directional constraints merge only when their directions agree.
std::vector<Constraint> deduplicate(const std::vector<Constraint>& constraints, double radius);

/// Normalizing frame for a constraint set: origin at the bounding box
/// minimum, scale = larger box side (1 for a single point).
CoordinateFrame normalizing_frame(const std::vector<Constraint>& constraints);

/// Assembles the system for constraints as given (no deduplication).
/// Throws EmptyConstraints.
LinearSystem assemble_system(const std::vector<Constraint>& constraints, const HbrbfConfig& config,
                             const CoordinateFrame& frame);
LinearSystem assemble_system(const std::vector<Constraint>& constraints, const HbrbfConfig& config);

/// Deduplicates, assembles and solves. Throws EmptyConstraints or SingularSystem.
HbrbfInterpolant fit(const std::vector<Constraint>& constraints, const HbrbfConfig& config);

inline double evaluate(const HbrbfInterpolant& interp, Point2 p) { return interp.evaluate(p); }
inline Vector2 evaluate_gradient(const HbrbfInterpolant& interp, Point2 p) { return interp.evaluate_gradient(p); }

}  // namespace geosketch
