#include "stochmatch/graph.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "stochmatch/errors.hpp"

namespace stochmatch {

StochasticGraph::StochasticGraph(std::vector<Vertex> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    std::unordered_set<std::string> names;
    names.reserve(vertices_.size());
    for (const Vertex& v : vertices_) {
        if (v.name.empty()) {
            throw ValidationError("vertex id must be a non-empty string");
        }
        if (!names.insert(v.name).second) {
            throw ValidationError("duplicate vertex id '" + v.name + "'");
        }
    }
    const int n = num_vertices();
    for (int e = 0; e < num_edges(); ++e) {
        const Edge& ed = edges_[e];
        if (ed.u < 0 || ed.u >= n || ed.v < 0 || ed.v >= n) {
            throw ValidationError("edge " + std::to_string(e) + " references an unknown vertex");
        }
        if (ed.u == ed.v) {
            throw ValidationError("edge " + std::to_string(e) + " is a self-loop");
        }
        if (!(ed.weight >= 0.0) || !std::isfinite(ed.weight)) {
            throw ValidationError("edge " + std::to_string(e) + " has weight outside [0, inf)");
        }
        if (!(ed.prob >= 0.0 && ed.prob <= 1.0)) {
            throw ValidationError("edge " + std::to_string(e) +
                                  " has activation probability outside [0, 1]");
        }
    }
    incident_.assign(n, {});
    for (int e = 0; e < num_edges(); ++e) {
        incident_[edges_[e].u].push_back(e);
        incident_[edges_[e].v].push_back(e);
    }
}

namespace {

// 2-colors every component (BFS from its smallest vertex id) and reports, per
// component, which color classes consist entirely of unit-patience vertices.
struct ComponentColoring {
    std::vector<int> color;  // 0/1 per vertex, -1 for unvisited
    std::vector<int> comp;   // component index per vertex
    int num_components = 0;
};

ComponentColoring two_color(const StochasticGraph& g) {
    const int n = g.num_vertices();
    ComponentColoring cc;
    cc.color.assign(n, -1);
    cc.comp.assign(n, -1);
    std::vector<int> queue;
    for (int start = 0; start < n; ++start) {
        if (cc.color[start] != -1) continue;
        const int c = cc.num_components++;
        cc.color[start] = 0;
        cc.comp[start] = c;
        queue.assign(1, start);
        while (!queue.empty()) {
            const int v = queue.back();
            queue.pop_back();
            for (int e : g.incident(v)) {
                const int w = g.other_endpoint(e, v);
                if (cc.color[w] == -1) {
                    cc.color[w] = 1 - cc.color[v];
                    cc.comp[w] = c;
                    queue.push_back(w);
                } else if (cc.color[w] == cc.color[v]) {
                    throw ValidationError("not bipartite");
                }
            }
        }
    }
    return cc;
}

}  // namespace

BipartitionWitness check_bipartite_unit_patience(const StochasticGraph& g) {
    const int n = g.num_vertices();
    const ComponentColoring cc = two_color(g);

    // Per component: can color class 0 / class 1 serve as the unit side?
    std::vector<unsigned char> class_ok(2 * cc.num_components, 1);
    for (int v = 0; v < n; ++v) {
        if (!(g.vertex(v).patience == Patience::finite(1))) {
            class_ok[2 * cc.comp[v] + cc.color[v]] = 0;
        }
    }
    // Orientation per component: 0 means color class 0 goes to side 1.  The
    // vertex scan is in ascending id order, so when both classes qualify the
    // class of the component's smallest vertex (color 0) wins.
    std::vector<int> orientation(cc.num_components, -1);
    for (int c = 0; c < cc.num_components; ++c) {
        if (class_ok[2 * c]) {
            orientation[c] = 0;
        } else if (class_ok[2 * c + 1]) {
            orientation[c] = 1;
        } else {
            throw ValidationError("no all-unit-patience side");
        }
    }

    BipartitionWitness w;
    w.side_of.assign(n, 2);
    for (int v = 0; v < n; ++v) {
        const bool unit_side = cc.color[v] == orientation[cc.comp[v]];
        w.side_of[v] = unit_side ? 1 : 2;
        (unit_side ? w.side1 : w.side2).push_back(v);
    }
    return w;
}

SplitResult split_edge(const StochasticGraph& g, int e) {
    if (e < 0 || e >= g.num_edges()) {
        throw ValidationError("split_edge: edge id " + std::to_string(e) + " out of range");
    }
    const Edge original = g.edge(e);
    if (!(original.prob > 0.0 && original.prob < 1.0)) {
        throw ValidationError("split_edge: edge " + std::to_string(e) +
                              " must have activation probability strictly inside (0, 1)");
    }
    std::vector<Edge> edges = g.edges();
    edges[e].prob = 0.0;
    Edge unit = original;
    unit.prob = 1.0;
    edges.push_back(unit);

    SplitResult r;
    r.graph = StochasticGraph(g.vertices(), std::move(edges));
    r.zero_prob_edge = e;
    r.unit_prob_edge = g.num_edges();
    r.original_prob = original.prob;
    return r;
}

std::vector<double> map_y_after_split(const SplitResult& split, std::span<const double> y) {
    if (static_cast<int>(y.size()) != split.graph.num_edges() - 1) {
        throw ValidationError("map_y_after_split: y has wrong dimension");
    }
    std::vector<double> out(y.begin(), y.end());
    const double y_e = y[split.zero_prob_edge];
    out[split.zero_prob_edge] = y_e * (1.0 - split.original_prob);
    out.push_back(y_e * split.original_prob);
    return out;
}

}  // namespace stochmatch
