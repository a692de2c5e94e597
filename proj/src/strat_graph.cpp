#include "geosketch/strat_graph.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <stdexcept>

#include "geosketch/error.hpp"

namespace geosketch {

const char* to_string(EdgeProvenance provenance) {
    return provenance == EdgeProvenance::Annotation ? "ANNOTATION" : "BOUNDARY_INFERENCE";
}

void StratGraph::add_node(const std::string& id) { nodes_.insert(id); }

void StratGraph::add_edge(const std::string& younger, const std::string& older, EdgeInfo info) {
    if (younger == older) {
        throw std::invalid_argument("self edge on unit '" + younger + "'");
    }
    nodes_.insert(younger);
    nodes_.insert(older);
    auto [it, inserted] = edges_.emplace(Edge{younger, older}, info);
    if (inserted) {
        return;
    }
    EdgeInfo& existing = it->second;
    if (existing.provenance == EdgeProvenance::BoundaryInference && info.provenance == EdgeProvenance::Annotation) {
        existing = info;
    } else if (existing.provenance == info.provenance && info.kind == RelationKind::Cuts) {
        existing.kind = RelationKind::Cuts;
    }
}

std::vector<std::string> StratGraph::older_than(const std::string& id) const {
    std::vector<std::string> out;
    for (auto it = edges_.lower_bound({id, std::string()}); it != edges_.end() && it->first.first == id; ++it) {
        out.push_back(it->first.second);
    }
    return out;
}

std::string CycleDiagnostic::describe() const {
    std::string out;
    for (const auto& id : cycle) {
        out += id + " -> ";
    }
    if (!cycle.empty()) {
        out += cycle.front();
    }
    return out;
}

StratGraph build_graph(const MapSketch& sketch) {
    StratGraph g;
    for (const auto& u : sketch.units) {
        g.add_node(u.id);
    }
    for (const auto& r : sketch.relations) {
        g.add_edge(r.younger, r.older, {EdgeProvenance::Annotation, r.kind});
    }
    for (const auto& b : sketch.boundaries) {
        g.add_edge(b.younger_unit, b.older_unit, {EdgeProvenance::BoundaryInference, RelationKind::Above});
    }
    return g;
}

namespace {

/// Shortest cycle through `start` using only nodes >= start, BFS in sorted
/// neighbour order so the first path found is the lexicographically least.
std::vector<std::string> shortest_cycle_from(const StratGraph& graph, const std::string& start) {
    std::map<std::string, std::string> parent;
    std::deque<std::string> queue{start};
    parent[start] = start;
    while (!queue.empty()) {
        const std::string u = queue.front();
        queue.pop_front();
        for (const auto& v : graph.older_than(u)) {
            if (v < start) {
                continue;
            }
            if (v == start) {
                std::vector<std::string> path{u};
                while (path.back() != start) {
                    path.push_back(parent[path.back()]);
                }
                std::reverse(path.begin(), path.end());
                return path;
            }
            if (parent.emplace(v, u).second) {
                queue.push_back(v);
            }
        }
    }
    return {};
}

}  // namespace

std::variant<AgeOrder, CycleDiagnostic> relative_ages(const StratGraph& graph) {
    // Kahn's algorithm on out-degree: a unit is emitted once everything it is
    // younger than has been emitted.
    std::map<std::string, std::size_t> pending;
    std::map<std::string, std::vector<std::string>> younger_of;
    for (const auto& id : graph.nodes()) {
        pending[id] = 0;
    }
    for (const auto& [edge, info] : graph.edges()) {
        pending[edge.first] += 1;
        younger_of[edge.second].push_back(edge.first);
    }
    std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
    for (const auto& [id, count] : pending) {
        if (count == 0) {
            ready.push(id);
        }
    }
    AgeOrder order;
    while (!ready.empty()) {
        std::string id = ready.top();
        ready.pop();
        for (const auto& y : younger_of[id]) {
            if (--pending[y] == 0) {
                ready.push(y);
            }
        }
        order.units_oldest_first.push_back(std::move(id));
    }
    if (order.units_oldest_first.size() == graph.nodes().size()) {
        return order;
    }

    std::vector<std::string> best;
    for (const auto& start : graph.nodes()) {
        auto cycle = shortest_cycle_from(graph, start);
        if (!cycle.empty() && (best.empty() || cycle.size() < best.size())) {
            best = std::move(cycle);
        }
    }
    CycleDiagnostic diag;
    diag.cycle = best;
    for (std::size_t k = 0; k < best.size(); ++k) {
        diag.edges.push_back(graph.edges().at({best[k], best[(k + 1) % best.size()]}));
    }
    return diag;
}

std::vector<std::string> horizon_age_order(const AgeOrder& order, const std::vector<HorizonSpec>& horizons) {
    std::map<std::string, std::size_t> rank;
    for (std::size_t i = 0; i < order.units_oldest_first.size(); ++i) {
        rank.emplace(order.units_oldest_first[i], i);
    }
    std::vector<std::pair<std::size_t, std::string>> keyed;
    for (const auto& h : horizons) {
        auto it = rank.find(h.below_unit);
        if (it == rank.end()) {
            throw UnknownUnit(h.below_unit);
        }
        keyed.emplace_back(it->second, h.id);
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<std::string> out;
    for (auto& [r, id] : keyed) {
        out.push_back(std::move(id));
    }
    return out;
}

}  // namespace geosketch
