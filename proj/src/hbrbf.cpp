#include "geosketch/hbrbf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "geosketch/error.hpp"

namespace geosketch {

namespace {

// Triharmonic kernel φ(r) = r³ as a function of d = x − c.
double phi(Vector2 d) {
    const double r = norm(d);
    return r * r * r;
}

// ∇φ(d) = 3‖d‖d.
Vector2 phi_gradient(Vector2 d) { return (3.0 * norm(d)) * d; }

// vᵀ H(d) w with H = 3(rI + ddᵀ/r); the r → 0 limit is 0.
double phi_hessian_form(Vector2 d, Vector2 v, Vector2 w) {
    const double r = norm(d);
    if (r == 0.0) {
        return 0.0;
    }
    return 3.0 * (r * dot(v, w) + dot(d, v) * dot(d, w) / r);
}

/// One scalar row of the system: a point evaluation, or a derivative along `direction`.
struct Functional {
    Point2 at;
    bool derivative = false;
    Vector2 direction;
};

/// Expands constraints (already in local coordinates) into scalar functionals and rhs values.
void expand(const std::vector<Constraint>& constraints, const CoordinateFrame& frame,
            std::vector<Functional>& functionals, std::vector<double>* values,
            std::vector<std::ptrdiff_t>* owners) {
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        const Constraint& c = constraints[i];
        const Point2 at = frame.to_local(c.location);
        auto push = [&](Functional f, double v) {
            functionals.push_back(f);
            if (values != nullptr) {
                values->push_back(v);
            }
            if (owners != nullptr) {
                owners->push_back(static_cast<std::ptrdiff_t>(i));
            }
        };
        // Slopes are per map meter; in the normalized frame they scale by `scale`.
        if (const auto* v = std::get_if<Constraint::Value>(&c.data)) {
            push({at, false, {}}, v->value);
        } else if (const auto* g = std::get_if<Constraint::Gradient>(&c.data)) {
            push({at, true, {1.0, 0.0}}, g->gradient.x * frame.scale);
            push({at, true, {0.0, 1.0}}, g->gradient.y * frame.scale);
        } else {
            const auto& dd = std::get<Constraint::Directional>(c.data);
            push({at, true, dd.direction}, dd.derivative * frame.scale);
        }
    }
}

/// Row functional applied to the basis function generated by the column functional.
double kernel_entry(const Functional& row, const Functional& col) {
    const Vector2 d = row.at - col.at;
    if (!row.derivative && !col.derivative) {
        return phi(d);
    }
    if (!row.derivative) {
        return -dot(phi_gradient(d), col.direction);
    }
    if (!col.derivative) {
        return dot(phi_gradient(d), row.direction);
    }
    return -phi_hessian_form(d, row.direction, col.direction);
}

std::size_t poly_size(int degree) { return degree == 0 ? 1 : 3; }

void poly_row(const Functional& f, int degree, double* out) {
    out[0] = f.derivative ? 0.0 : 1.0;
    if (degree == 1) {
        out[1] = f.derivative ? f.direction.x : f.at.x;
        out[2] = f.derivative ? f.direction.y : f.at.y;
    }
}

void check_config(const HbrbfConfig& config) {
    if (config.poly_degree != 0 && config.poly_degree != 1) {
        throw std::invalid_argument("poly_degree must be 0 or 1");
    }
    if (!std::isfinite(config.regularization) || config.regularization < 0.0) {
        throw std::invalid_argument("regularization must be finite and non-negative");
    }
    if (!(config.dedup_radius >= 0.0)) {
        throw std::invalid_argument("dedup_radius must be non-negative");
    }
}

}  // namespace

Constraint Constraint::directional(Point2 at, Vector2 direction, double derivative) {
    if (std::abs(norm(direction) - 1.0) > 1e-12) {
        throw std::invalid_argument("directional constraint needs a unit direction");
    }
    return {at, Directional{direction, derivative}};
}

HbrbfConfig HbrbfConfig::for_bounds(const Bounds& bounds) {
    HbrbfConfig config;
    config.dedup_radius = 1e-6 * bounds.diagonal();
    return config;
}

std::vector<Constraint> deduplicate(const std::vector<Constraint>& constraints, double radius) {
    if (!(radius > 0.0)) {
        return constraints;
    }
    struct Cluster {
        Constraint first;
        Point2 location_sum;
        double value_sum = 0.0;
        Vector2 vector_sum;
        std::size_t count = 0;
    };
    auto same_kind = [](const Constraint& a, const Constraint& b) {
        if (a.data.index() != b.data.index()) {
            return false;
        }
        if (a.is_directional()) {
            const auto& da = std::get<Constraint::Directional>(a.data);
            const auto& db = std::get<Constraint::Directional>(b.data);
            return dot(da.direction, db.direction) > 1.0 - 1e-9;
        }
        return true;
    };

    std::vector<Cluster> clusters;
    for (const Constraint& c : constraints) {
        Cluster* target = nullptr;
        for (Cluster& cl : clusters) {
            if (same_kind(cl.first, c) && distance(cl.first.location, c.location) < radius) {
                target = &cl;
                break;
            }
        }
        if (target == nullptr) {
            clusters.push_back({c, {}, 0.0, {}, 0});
            target = &clusters.back();
        }
        target->location_sum = target->location_sum + c.location;
        target->count += 1;
        if (const auto* v = std::get_if<Constraint::Value>(&c.data)) {
            target->value_sum += v->value;
        } else if (const auto* g = std::get_if<Constraint::Gradient>(&c.data)) {
            target->vector_sum = target->vector_sum + g->gradient;
        } else {
            target->value_sum += std::get<Constraint::Directional>(c.data).derivative;
        }
    }

    std::vector<Constraint> out;
    out.reserve(clusters.size());
    for (const Cluster& cl : clusters) {
        if (cl.count == 1) {
            out.push_back(cl.first);
            continue;
        }
        const double inv = 1.0 / static_cast<double>(cl.count);
        Constraint merged = cl.first;
        merged.location = inv * cl.location_sum;
        if (merged.is_value()) {
            merged.data = Constraint::Value{cl.value_sum * inv};
        } else if (merged.is_gradient()) {
            merged.data = Constraint::Gradient{inv * cl.vector_sum};
        } else {
            auto dd = std::get<Constraint::Directional>(cl.first.data);
            dd.derivative = cl.value_sum * inv;
            merged.data = dd;
        }
        out.push_back(merged);
    }
    return out;
}

CoordinateFrame normalizing_frame(const std::vector<Constraint>& constraints) {
    CoordinateFrame frame;
    if (constraints.empty()) {
        return frame;
    }
    Point2 lo = constraints.front().location;
    Point2 hi = lo;
    for (const auto& c : constraints) {
        lo = {std::min(lo.x, c.location.x), std::min(lo.y, c.location.y)};
        hi = {std::max(hi.x, c.location.x), std::max(hi.y, c.location.y)};
    }
    frame.origin = lo;
    const double extent = std::max(hi.x - lo.x, hi.y - lo.y);
    frame.scale = extent > 0.0 ? extent : 1.0;
    return frame;
}

LinearSystem assemble_system(const std::vector<Constraint>& constraints, const HbrbfConfig& config,
                             const CoordinateFrame& frame) {
    check_config(config);
    if (constraints.empty()) {
        throw EmptyConstraints();
    }
    std::vector<Functional> rows;
    std::vector<double> values;
    LinearSystem sys;
    expand(constraints, frame, rows, &values, &sys.row_constraint);

    const std::size_t n = rows.size();
    const std::size_t m = poly_size(config.poly_degree);
    sys.rbf_rows = n;
    sys.poly_rows = m;
    sys.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + m), static_cast<Eigen::Index>(n + m));
    sys.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + m));

    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        for (std::size_t k = 0; k <= i; ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            const double a = kernel_entry(rows[i], rows[k]);
            sys.matrix(ii, kk) = a;
            sys.matrix(kk, ii) = a;
        }
        sys.matrix(ii, ii) += config.regularization;
        double p[3];
        poly_row(rows[i], config.poly_degree, p);
        for (std::size_t j = 0; j < m; ++j) {
            const auto jj = static_cast<Eigen::Index>(n + j);
            sys.matrix(ii, jj) = p[j];
            sys.matrix(jj, ii) = p[j];
        }
        sys.rhs(ii) = values[i];
    }
    sys.row_constraint.resize(n + m, -1);
    return sys;
}

LinearSystem assemble_system(const std::vector<Constraint>& constraints, const HbrbfConfig& config) {
    return assemble_system(constraints, config, normalizing_frame(constraints));
}

HbrbfInterpolant fit(const std::vector<Constraint>& constraints, const HbrbfConfig& config) {
    check_config(config);
    if (constraints.empty()) {
        throw EmptyConstraints();
    }
    HbrbfInterpolant out;
    out.config_ = config;
    out.centers_ = deduplicate(constraints, config.dedup_radius);
    out.frame_ = normalizing_frame(out.centers_);

    const LinearSystem sys = assemble_system(out.centers_, config, out.frame_);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.matrix);

    const double norm_a = sys.matrix.cwiseAbs().maxCoeff();
    const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    auto singular = [&](const std::string& why) {
        std::ostringstream msg;
        msg << "interpolation system with " << sys.matrix.rows() << " rows is singular (" << why
            << "); constraints may be duplicated or too few to fix the degree-" << config.poly_degree
            << " polynomial. Try a regularization > 0 or a larger dedup radius";
        return SingularSystem(msg.str());
    };
    if (!(min_pivot > 1e-12 * norm_a)) {
        std::ostringstream why;
        why << "pivot " << min_pivot << " below 1e-12 * " << norm_a;
        throw singular(why.str());
    }
    const Eigen::VectorXd x = lu.solve(sys.rhs);
    const double residual = (sys.matrix * x - sys.rhs).lpNorm<Eigen::Infinity>();
    const double scale = sys.matrix.lpNorm<Eigen::Infinity>() * x.lpNorm<Eigen::Infinity>() +
                         sys.rhs.lpNorm<Eigen::Infinity>();
    if (!x.allFinite() || residual > 1e-8 * scale) {
        throw singular("solution residual too large");
    }

    const auto n = static_cast<Eigen::Index>(sys.rbf_rows);
    out.coefficients_ = x.head(n);
    out.poly_ = x.tail(static_cast<Eigen::Index>(sys.poly_rows));
    out.local_centers_.reserve(out.centers_.size());
    for (const auto& c : out.centers_) {
        out.local_centers_.push_back(out.frame_.to_local(c.location));
    }
    return out;
}

double HbrbfInterpolant::evaluate(Point2 p) const {
    const Point2 x = frame_.to_local(p);
    double s = 0.0;
    Eigen::Index k = 0;
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        const Vector2 d = x - local_centers_[i];
        const Constraint& c = centers_[i];
        if (c.is_value()) {
            s += coefficients_[k++] * phi(d);
            continue;
        }
        const Vector2 g = phi_gradient(d);
        if (c.is_gradient()) {
            s -= coefficients_[k] * g.x + coefficients_[k + 1] * g.y;
            k += 2;
        } else {
            s -= coefficients_[k++] * dot(g, std::get<Constraint::Directional>(c.data).direction);
        }
    }
    s += poly_[0];
    if (poly_.size() == 3) {
        s += poly_[1] * x.x + poly_[2] * x.y;
    }
    return s;
}

Vector2 HbrbfInterpolant::evaluate_gradient(Point2 p) const {
    const Point2 x = frame_.to_local(p);
    Vector2 g{};
    Eigen::Index k = 0;
    const Vector2 ex{1.0, 0.0};
    const Vector2 ey{0.0, 1.0};
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        const Vector2 d = x - local_centers_[i];
        const Constraint& c = centers_[i];
        if (c.is_value()) {
            g = g + coefficients_[k++] * phi_gradient(d);
            continue;
        }
        // ∇ of −w·∇φ(d) is −H(d)w.
        Vector2 w;
        if (c.is_gradient()) {
            w = {coefficients_[k], coefficients_[k + 1]};
            k += 2;
        } else {
            w = coefficients_[k++] * std::get<Constraint::Directional>(c.data).direction;
        }
        g = g - Vector2{phi_hessian_form(d, ex, w), phi_hessian_form(d, ey, w)};
    }
    if (poly_.size() == 3) {
        g = g + Vector2{poly_[1], poly_[2]};
    }
    return (1.0 / frame_.scale) * g;
}

}  // namespace geosketch
