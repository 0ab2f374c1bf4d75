#pragma once

#include <span>
#include <string>
#include <vector>

#include "stochmatch/patience.hpp"

namespace stochmatch {

struct Vertex {
    std::string name;
    Patience patience = Patience::finite(1);
};

struct Edge {
    int u = -1;  // dense vertex ids
    int v = -1;
    double weight = 0.0;  // >= 0
    double prob = 0.0;    // activation probability in [0, 1]
};

// Immutable weighted graph with per-edge activation probabilities and
// per-vertex patience budgets.  Vertex and edge ids are dense integers in
// declaration order; parallel edges are allowed, self-loops are not.
class StochasticGraph {
public:
    StochasticGraph() = default;
    // Validates all invariants (distinct names, endpoint range, no self-loops,
    // weight/probability ranges) and builds the incidence index.
    StochasticGraph(std::vector<Vertex> vertices, std::vector<Edge> edges);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    const Vertex& vertex(int v) const { return vertices_[v]; }
    const Edge& edge(int e) const { return edges_[e]; }
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }

    // Edge ids incident to v, ascending.
    const std::vector<int>& incident(int v) const { return incident_[v]; }
    int degree(int v) const { return static_cast<int>(incident_[v].size()); }

    // For edge e, the endpoint that is not `vertex`.
    int other_endpoint(int e, int vertex) const {
        const Edge& ed = edges_[e];
        return ed.u == vertex ? ed.v : ed.u;
    }

    double edge_z(int e, double y) const { return edges_[e].prob * y; }

private:
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> incident_;
};

// Bipartition in which every side-1 vertex has patience exactly 1.
struct BipartitionWitness {
    std::vector<int> side1;          // ascending vertex ids, all unit patience
    std::vector<int> side2;          // ascending vertex ids
    std::vector<unsigned char> side_of;  // per vertex: 1 or 2
};

// Throws ValidationError("not bipartite") / ("no all-unit-patience side").
// Components are oriented independently; when both orientations qualify, the
// side containing the smallest vertex id becomes side 1.
BipartitionWitness check_bipartite_unit_patience(const StochasticGraph& g);

// Result of splitting edge e with 0 < p_e < 1 into a p=0 copy and a p=1 copy
// of the same weight.  The p=0 copy reuses e's id so all other edge ids stay
// stable; the p=1 copy is appended with the next fresh id.
struct SplitResult {
    StochasticGraph graph;
    int zero_prob_edge = -1;  // == the split edge's original id
    int unit_prob_edge = -1;  // == original |E|
    double original_prob = 0.0;
};

SplitResult split_edge(const StochasticGraph& g, int e);

// Transfers a fractional vector for the original graph onto the split graph:
// y[f0] = y[e]*(1-p_e) and y[f1] = y[e]*p_e, preserving both the y-mass and
// the z-mass at every vertex.
std::vector<double> map_y_after_split(const SplitResult& split, std::span<const double> y);

}  // namespace stochmatch
