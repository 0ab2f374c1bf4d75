#include "stochmatch/rounding.hpp"

#include <algorithm>
#include <cmath>

#include "stochmatch/errors.hpp"
#include "stochmatch/rng.hpp"

namespace stochmatch {

namespace {

constexpr double kSnapTol = 1e-12;
constexpr double kZ99 = 2.5758293035489004;

void snap(std::vector<double>& y) {
    for (double& v : y) {
        if (std::abs(v) < kSnapTol) v = 0.0;
        if (std::abs(v - 1.0) < kSnapTol) v = 1.0;
    }
}

void require_bipartite(const StochasticGraph& g) {
    std::vector<int> color(g.num_vertices(), -1);
    std::vector<int> queue;
    for (int start = 0; start < g.num_vertices(); ++start) {
        if (color[start] != -1) continue;
        color[start] = 0;
        queue.assign(1, start);
        while (!queue.empty()) {
            const int v = queue.back();
            queue.pop_back();
            for (int e : g.incident(v)) {
                const int w = g.other_endpoint(e, v);
                if (color[w] == -1) {
                    color[w] = 1 - color[v];
                    queue.push_back(w);
                } else if (color[w] == color[v]) {
                    throw ValidationError("not bipartite");
                }
            }
        }
    }
}

// Floating subgraph as per-vertex lists of floating edge ids (ascending).
std::vector<std::vector<int>> floating_adjacency(const StochasticGraph& g,
                                                 const std::vector<double>& y) {
    std::vector<std::vector<int>> adj(g.num_vertices());
    for (int e = 0; e < g.num_edges(); ++e) {
        if (y[e] > 0.0 && y[e] < 1.0) {
            adj[g.edge(e).u].push_back(e);
            adj[g.edge(e).v].push_back(e);
        }
    }
    return adj;
}

// DFS for a cycle in the floating subgraph; deterministic (ascending start
// vertices, ascending edge ids).  Returns consecutive edge ids around the
// cycle, or empty.  Parallel edges form valid 2-cycles, so only the arrival
// edge itself is excluded, not the parent vertex.
std::vector<int> find_cycle(const StochasticGraph& g, const std::vector<std::vector<int>>& adj) {
    const int n = g.num_vertices();
    std::vector<std::uint8_t> visited(n, 0), on_path(n, 0);
    std::vector<int> parent_edge(n, -1), parent_vertex(n, -1);

    struct Frame {
        int vertex;
        int incoming;
        size_t pos;
    };
    std::vector<Frame> stack;
    for (int start = 0; start < n; ++start) {
        if (visited[start] || adj[start].empty()) continue;
        visited[start] = on_path[start] = 1;
        stack.push_back({start, -1, 0});
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.pos >= adj[f.vertex].size()) {
                on_path[f.vertex] = 0;
                stack.pop_back();
                continue;
            }
            const int e = adj[f.vertex][f.pos++];
            if (e == f.incoming) continue;
            const int w = g.other_endpoint(e, f.vertex);
            if (!visited[w]) {
                visited[w] = on_path[w] = 1;
                parent_edge[w] = e;
                parent_vertex[w] = f.vertex;
                stack.push_back({w, e, 0});
            } else if (on_path[w]) {
                // Back edge: close the cycle w -> ... -> f.vertex -> w.
                std::vector<int> cycle{e};
                int cur = f.vertex;
                while (cur != w) {
                    cycle.push_back(parent_edge[cur]);
                    cur = parent_vertex[cur];
                }
                return cycle;
            }
        }
    }
    return {};
}

// With no cycle the floating subgraph is a forest; walk from the lowest-id
// floating-degree-1 vertex to another leaf, taking the lowest-id continuation
// at every step.  Both endpoints end with exactly one floating edge, so the
// path is maximal.
std::vector<int> find_maximal_path(const StochasticGraph& g,
                                   const std::vector<std::vector<int>>& adj) {
    int leaf = -1;
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (adj[v].size() == 1) {
            leaf = v;
            break;
        }
    }
    if (leaf < 0) return {};  // no floating edges at all

    std::vector<int> path;
    int cur = leaf, incoming = -1;
    while (true) {
        int next_edge = -1;
        for (int e : adj[cur]) {
            if (e != incoming) {
                next_edge = e;
                break;
            }
        }
        if (next_edge < 0) break;  // reached the far leaf
        path.push_back(next_edge);
        cur = g.other_endpoint(next_edge, cur);
        incoming = next_edge;
        if (adj[cur].size() == 1) break;
    }
    return path;
}

}  // namespace

RoundedVector dependent_round(const StochasticGraph& g, std::span<const double> y_in,
                              std::uint64_t seed) {
    if (static_cast<int>(y_in.size()) != g.num_edges()) {
        throw ValidationError("dependent_round: y has wrong dimension");
    }
    for (double v : y_in) {
        if (!(v >= -kSnapTol && v <= 1.0 + kSnapTol)) {
            throw ValidationError("dependent_round: y outside [0, 1]");
        }
    }
    require_bipartite(g);

    std::vector<double> y(y_in.begin(), y_in.end());
    for (double& v : y) v = std::clamp(v, 0.0, 1.0);
    snap(y);

    RoundedVector out;
    const int max_iterations = 2 * g.num_edges() + 4;
    while (true) {
        const auto adj = floating_adjacency(g, y);
        std::vector<int> walk = find_cycle(g, adj);
        if (walk.empty()) walk = find_maximal_path(g, adj);
        if (walk.empty()) break;

        // Alternate colors along the walk; bipartiteness makes cycles even,
        // so the coloring is consistent.
        double raise_cap = 1.0, lower_cap = 1.0;  // caps for the alpha shift
        double raise_cap_b = 1.0, lower_cap_b = 1.0;
        for (size_t i = 0; i < walk.size(); ++i) {
            const double v = y[walk[i]];
            if (i % 2 == 0) {
                raise_cap = std::min(raise_cap, 1.0 - v);  // color 1 goes up under alpha
                raise_cap_b = std::min(raise_cap_b, v);    // ... and down under beta
            } else {
                lower_cap = std::min(lower_cap, v);
                lower_cap_b = std::min(lower_cap_b, 1.0 - v);
            }
        }
        const double alpha = std::min(raise_cap, lower_cap);
        const double beta = std::min(raise_cap_b, lower_cap_b);

        const bool use_alpha =
            rng::uniform01(seed, out.iterations, 0, rng::Draw::coin) < beta / (alpha + beta);
        const double shift = use_alpha ? alpha : -beta;
        for (size_t i = 0; i < walk.size(); ++i) {
            y[walk[i]] += (i % 2 == 0) ? shift : -shift;
        }
        snap(y);

        if (++out.iterations > max_iterations) {
            throw NumericalError("dependent_round: iteration guard exceeded");
        }
    }

    out.values.resize(g.num_edges());
    for (int e = 0; e < g.num_edges(); ++e) {
        out.values[e] = y[e] >= 0.5 ? 1 : 0;
    }
    return out;
}

bool degree_rounding_ok(const StochasticGraph& g, std::span<const double> y,
                        const RoundedVector& rounded) {
    for (int v = 0; v < g.num_vertices(); ++v) {
        double frac = 0.0;
        int sum = 0;
        for (int e : g.incident(v)) {
            frac += y[e];
            sum += rounded.values[e];
        }
        const double lo = std::floor(frac + 1e-9);
        const double hi = std::ceil(frac - 1e-9);
        if (sum < lo - 1e-9 || sum > hi + 1e-9) return false;
    }
    return true;
}

NegativeCorrelationReport verify_negative_correlation(const StochasticGraph& g,
                                                      std::span<const double> y,
                                                      std::uint64_t reps, std::uint64_t seed) {
    if (reps == 0) throw ValidationError("verify_negative_correlation: reps must be positive");

    // Enumerate the subsets to track: every S inside one vertex's edge set
    // with |S| <= 4.
    struct Tracked {
        int vertex;
        std::vector<int> edges;
        std::uint64_t all_one = 0;
        std::uint64_t all_zero = 0;
    };
    std::vector<Tracked> tracked;
    for (int v = 0; v < g.num_vertices(); ++v) {
        const auto& inc = g.incident(v);
        const int d = static_cast<int>(inc.size());
        const int limit = std::min(d, 4);
        std::vector<int> pick;
        auto recurse = [&](auto&& self, int start, int remaining) -> void {
            if (!pick.empty()) tracked.push_back({v, pick, 0, 0});
            if (remaining == 0) return;
            for (int i = start; i < d; ++i) {
                pick.push_back(inc[i]);
                self(self, i + 1, remaining - 1);
                pick.pop_back();
            }
        };
        recurse(recurse, 0, limit);
    }

    for (std::uint64_t rep = 0; rep < reps; ++rep) {
        const RoundedVector r = dependent_round(g, y, rng::subseed(seed, rep));
        for (Tracked& t : tracked) {
            bool one = true, zero = true;
            for (int e : t.edges) {
                if (r.values[e]) {
                    zero = false;
                } else {
                    one = false;
                }
            }
            t.all_one += one;
            t.all_zero += zero;
        }
    }

    NegativeCorrelationReport report;
    report.reps = reps;
    bool first = true;
    for (const Tracked& t : tracked) {
        for (int b = 0; b < 2; ++b) {
            const double empirical =
                static_cast<double>(b ? t.all_one : t.all_zero) / static_cast<double>(reps);
            double product = 1.0;
            for (int e : t.edges) product *= b ? y[e] : 1.0 - y[e];
            const double se = std::sqrt(empirical * (1.0 - empirical) / static_cast<double>(reps));
            const double margin = product + 4.0 * se - empirical;
            ++report.checks;
            if (margin < 0.0) ++report.violations;
            if (first || margin < report.worst_margin) {
                report.worst_margin = margin;
                report.worst_vertex = t.vertex;
                report.worst_subset = t.edges;
                report.worst_b = b;
                first = false;
            }
        }
    }
    return report;
}

}  // namespace stochmatch
