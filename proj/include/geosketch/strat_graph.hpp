#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "geosketch/sketch.hpp"

namespace geosketch {

enum class EdgeProvenance { Annotation, BoundaryInference };

const char* to_string(EdgeProvenance provenance);

struct EdgeInfo {
    EdgeProvenance provenance = EdgeProvenance::Annotation;
    RelationKind kind = RelationKind::Above;

    friend bool operator==(const EdgeInfo&, const EdgeInfo&) = default;
};

/// Relation graph over rock units. Edges point from the younger to the older unit.
class StratGraph {
public:
    using Edge = std::pair<std::string, std::string>;  // (younger, older)

    void add_node(const std::string& id);
    /// Adds younger → older. An existing edge keeps annotation provenance over
    /// boundary inference, and CUTS over ABOVE among annotations.
    void add_edge(const std::string& younger, const std::string& older, EdgeInfo info);

    const std::set<std::string>& nodes() const { return nodes_; }
    const std::map<Edge, EdgeInfo>& edges() const { return edges_; }
    bool has_edge(const std::string& younger, const std::string& older) const {
        return edges_.count({younger, older}) != 0;
    }
    /// Older neighbours of `id`, sorted.
    std::vector<std::string> older_than(const std::string& id) const;

    friend bool operator==(const StratGraph&, const StratGraph&) = default;

private:
    std::set<std::string> nodes_;
    std::map<Edge, EdgeInfo> edges_;
};

struct AgeOrder {
    std::vector<std::string> units_oldest_first;

    friend bool operator==(const AgeOrder&, const AgeOrder&) = default;
};

struct CycleDiagnostic {
    /// cycle[k] → cycle[k+1] (and last → first) are graph edges.
    std::vector<std::string> cycle;
    std::vector<EdgeInfo> edges;

    std::string describe() const;

    friend bool operator==(const CycleDiagnostic&, const CycleDiagnostic&) = default;
};

StratGraph build_graph(const MapSketch& sketch);

/// Oldest-first topological order with lexicographic tie-breaking, or a
/// shortest cycle (ties: least smallest id, then lexicographic sequence).
std::variant<AgeOrder, CycleDiagnostic> relative_ages(const StratGraph& graph);

/// Horizons ordered by the age rank of their below_unit, ties by id. Throws UnknownUnit.
std::vector<std::string> horizon_age_order(const AgeOrder& order, const std::vector<HorizonSpec>& horizons);

}  // namespace geosketch
