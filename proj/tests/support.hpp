// Test-only helpers: random generators, an independent HBRBF oracle, an
// independent OBJ reader and brute-force ordering checks.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "geosketch/hbrbf.hpp"
#include "geosketch/sketch.hpp"
#include "geosketch/strat_graph.hpp"

namespace testsupport {

using geosketch::Constraint;
using geosketch::Point2;
using geosketch::Vector2;

inline std::string fixture_path(const std::string& name) { return std::string(GEOSKETCH_FIXTURES) + "/" + name; }

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline geosketch::MapSketch load_fixture(const std::string& name) {
    return geosketch::parse_sketch(read_text(fixture_path(name)));
}

/// Points in [0,1]² with pairwise distance >= min_sep (rejection sampling).
inline std::vector<Point2> separated_points(std::mt19937_64& rng, std::size_t n, double min_sep) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point2> pts;
    while (pts.size() < n) {
        const Point2 p{u(rng), u(rng)};
        bool ok = true;
        for (const auto& q : pts) {
            if (geosketch::distance(p, q) < min_sep) {
                ok = false;
                break;
            }
        }
        if (ok) {
            pts.push_back(p);
        }
    }
    return pts;
}

/// Random mixed constraint set at separated locations; at least 3 values.
inline std::vector<Constraint> random_constraints(std::mt19937_64& rng, std::size_t n, double min_sep = 1e-3) {
    std::uniform_real_distribution<double> val(-10.0, 10.0);
    std::uniform_real_distribution<double> slope(-2.0, 2.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::uniform_int_distribution<int> kind(0, 2);
    const auto pts = separated_points(rng, n, min_sep);
    std::vector<Constraint> out;
    for (std::size_t i = 0; i < n; ++i) {
        const int k = i < 3 ? 0 : kind(rng);
        if (k == 0) {
            out.push_back(Constraint::value(pts[i], val(rng)));
        } else if (k == 1) {
            out.push_back(Constraint::gradient(pts[i], {slope(rng), slope(rng)}));
        } else {
            const double a = angle(rng);
            out.push_back(Constraint::directional(pts[i], {std::cos(a), std::sin(a)}, slope(rng)));
        }
    }
    return out;
}

/// Residual of the interpolant against one constraint, relative as in
/// |s − v| / (1 + |v|).
inline double relative_residual(const geosketch::HbrbfInterpolant& s, const Constraint& c) {
    if (const auto* v = std::get_if<Constraint::Value>(&c.data)) {
        return std::abs(s.evaluate(c.location) - v->value) / (1.0 + std::abs(v->value));
    }
    const Vector2 g = s.evaluate_gradient(c.location);
    if (const auto* gr = std::get_if<Constraint::Gradient>(&c.data)) {
        return geosketch::norm(g - gr->gradient) / (1.0 + geosketch::norm(gr->gradient));
    }
    const auto& d = std::get<Constraint::Directional>(c.data);
    return std::abs(geosketch::dot(g, d.direction) - d.derivative) / (1.0 + std::abs(d.derivative));
}

/// Independent dense Hermite-Birkhoff solve in raw coordinates. Each scalar
/// functional is a weight vector over (value, ∂x, ∂y); the kernel matrix
/// entry is wᵢᵀ D wⱼ with D built from explicit partials of r³. Solved by
/// Gaussian elimination with partial pivoting in long double.
class DenseOracle {
public:
    explicit DenseOracle(const std::vector<Constraint>& constraints) {
        for (const auto& c : constraints) {
            if (const auto* v = std::get_if<Constraint::Value>(&c.data)) {
                rows_.push_back({c.location, {1, 0, 0}});
                rhs_.push_back(v->value);
            } else if (const auto* g = std::get_if<Constraint::Gradient>(&c.data)) {
                rows_.push_back({c.location, {0, 1, 0}});
                rhs_.push_back(g->gradient.x);
                rows_.push_back({c.location, {0, 0, 1}});
                rhs_.push_back(g->gradient.y);
            } else {
                const auto& d = std::get<Constraint::Directional>(c.data);
                rows_.push_back({c.location, {0, d.direction.x, d.direction.y}});
                rhs_.push_back(d.derivative);
            }
        }
        const std::size_t n = rows_.size();
        const std::size_t size = n + 3;
        std::vector<std::vector<long double>> a(size, std::vector<long double>(size + 1, 0.0L));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const auto d = partials(rows_[i].at, rows_[j].at);
                long double sum = 0.0L;
                for (int p = 0; p < 3; ++p) {
                    for (int q = 0; q < 3; ++q) {
                        sum += rows_[i].w[p] * d[p][q] * rows_[j].w[q];
                    }
                }
                a[i][j] = sum;
            }
            const auto& w = rows_[i].w;
            const long double poly[3] = {w[0], w[0] * rows_[i].at.x + w[1], w[0] * rows_[i].at.y + w[2]};
            for (int k = 0; k < 3; ++k) {
                a[i][n + k] = poly[k];
                a[n + k][i] = poly[k];
            }
            a[i][size] = rhs_[i];
        }
        for (std::size_t col = 0; col < size; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < size; ++r) {
                if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) {
                    piv = r;
                }
            }
            std::swap(a[col], a[piv]);
            for (std::size_t r = col + 1; r < size; ++r) {
                const long double f = a[r][col] / a[col][col];
                for (std::size_t k = col; k <= size; ++k) {
                    a[r][k] -= f * a[col][k];
                }
            }
        }
        coef_.assign(size, 0.0L);
        for (std::size_t r = size; r-- > 0;) {
            long double s = a[r][size];
            for (std::size_t k = r + 1; k < size; ++k) {
                s -= a[r][k] * coef_[k];
            }
            coef_[r] = s / a[r][r];
        }
    }

    double evaluate(Point2 x) const {
        const std::size_t n = rows_.size();
        long double s = coef_[n] + coef_[n + 1] * x.x + coef_[n + 2] * x.y;
        for (std::size_t j = 0; j < n; ++j) {
            const auto d = partials(x, rows_[j].at);
            for (int q = 0; q < 3; ++q) {
                s += coef_[j] * d[0][q] * rows_[j].w[q];
            }
        }
        return static_cast<double>(s);
    }

private:
    struct Row {
        Point2 at;
        std::array<long double, 3> w;
    };

    // D[p][q] = (row functional p in x)(column functional q in y) of |x − y|³,
    // p, q over {value, ∂/∂·x, ∂/∂·y}; y-derivatives flip the sign.
    static std::array<std::array<long double, 3>, 3> partials(Point2 x, Point2 y) {
        const long double dx = x.x - y.x;
        const long double dy = x.y - y.y;
        const long double r = std::sqrt(dx * dx + dy * dy);
        const long double fx = 3 * r * dx;
        const long double fy = 3 * r * dy;
        long double fxx = 0, fxy = 0, fyy = 0;
        if (r > 0) {
            fxx = 3 * (r + dx * dx / r);
            fxy = 3 * dx * dy / r;
            fyy = 3 * (r + dy * dy / r);
        }
        return {{{r * r * r, -fx, -fy}, {fx, -fxx, -fxy}, {fy, -fxy, -fyy}}};
    }

    std::vector<Row> rows_;
    std::vector<double> rhs_;
    std::vector<long double> coef_;
};

/// Minimal OBJ reader written separately from the writer: counts objects,
/// vertices and faces and checks every face index.
struct ObjStats {
    std::vector<std::string> objects;
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<long, 3>> faces;
    std::map<std::string, std::pair<std::size_t, std::size_t>> per_object;  // name -> (v, f)
    bool indices_valid = true;
    bool parsed = true;
};

inline ObjStats read_obj(const std::string& text) {
    ObjStats stats;
    std::istringstream in(text);
    std::string line;
    std::string current;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "o") {
            ls >> current;
            stats.objects.push_back(current);
            stats.per_object[current] = {0, 0};
        } else if (tag == "v") {
            std::array<double, 3> v{};
            if (!(ls >> v[0] >> v[1] >> v[2])) {
                stats.parsed = false;
            }
            stats.vertices.push_back(v);
            stats.per_object[current].first += 1;
        } else if (tag == "f") {
            std::array<long, 3> f{};
            if (!(ls >> f[0] >> f[1] >> f[2])) {
                stats.parsed = false;
            }
            stats.faces.push_back(f);
            stats.per_object[current].second += 1;
        } else {
            stats.parsed = false;
        }
    }
    for (const auto& f : stats.faces) {
        for (long idx : f) {
            if (idx < 1 || idx > static_cast<long>(stats.vertices.size())) {
                stats.indices_valid = false;
            }
        }
    }
    return stats;
}

/// Random graph over up to `max_nodes` single-letter-ish ids.
inline geosketch::StratGraph random_graph(std::mt19937_64& rng, int max_nodes, double edge_prob) {
    std::uniform_int_distribution<int> count(1, max_nodes);
    std::bernoulli_distribution edge(edge_prob);
    const int n = count(rng);
    geosketch::StratGraph g;
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) {
        ids.push_back(std::string(1, static_cast<char>('A' + i)) + std::to_string(i % 3));
        g.add_node(ids.back());
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && edge(rng)) {
                g.add_edge(ids[i], ids[j], {});
            }
        }
    }
    return g;
}

/// True if some permutation of the nodes satisfies every edge (older first).
inline bool brute_force_orderable(const geosketch::StratGraph& g) {
    std::vector<std::string> perm(g.nodes().begin(), g.nodes().end());
    do {
        std::map<std::string, std::size_t> pos;
        for (std::size_t i = 0; i < perm.size(); ++i) {
            pos[perm[i]] = i;
        }
        bool ok = true;
        for (const auto& [e, info] : g.edges()) {
            if (pos[e.second] >= pos[e.first]) {
                ok = false;
                break;
            }
        }
        if (ok) {
            return true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

inline bool order_respects_edges(const geosketch::StratGraph& g, const std::vector<std::string>& order) {
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) {
        pos[order[i]] = i;
    }
    if (pos.size() != g.nodes().size() || order.size() != g.nodes().size()) {
        return false;
    }
    for (const auto& [e, info] : g.edges()) {
        if (!pos.count(e.first) || !pos.count(e.second) || pos[e.second] >= pos[e.first]) {
            return false;
        }
    }
    return true;
}

}  // namespace testsupport
