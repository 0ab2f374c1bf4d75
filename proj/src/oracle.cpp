#include "stochmatch/oracle.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <unordered_map>

#include "stochmatch/errors.hpp"

namespace stochmatch {

namespace {

constexpr int kMaxOracleEdges = 10;
constexpr std::uint8_t kInfinitePatience = 0xff;

// State key: bitmask of still-available edges plus the remaining patience of
// every vertex, canonicalized so that vertices without available edges carry
// patience 0.  With <= 10 edges at most 20 vertices can touch an edge, so the
// patience vector packs into a fixed array.
struct StateKey {
    std::uint16_t avail = 0;
    std::array<std::uint8_t, 20> pat{};

    bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
    size_t operator()(const StateKey& k) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ k.avail;
        for (std::uint8_t p : k.pat) {
            h ^= p + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<size_t>(h);
    }
};

class AdaptiveDp {
public:
    explicit AdaptiveDp(const StochasticGraph& g) : g_(g) {
        // Compact ids for vertices that touch an edge.
        compact_.assign(g.num_vertices(), -1);
        for (const Edge& e : g.edges()) {
            for (int v : {e.u, e.v}) {
                if (compact_[v] < 0) {
                    compact_[v] = num_compact_++;
                }
            }
        }
    }

    double run() {
        StateKey init;
        init.avail = static_cast<std::uint16_t>((1u << g_.num_edges()) - 1u);
        for (int v = 0; v < g_.num_vertices(); ++v) {
            if (compact_[v] < 0) continue;
            const Patience& t = g_.vertex(v).patience;
            // Patience beyond the vertex degree can never bind.
            init.pat[compact_[v]] =
                t.is_infinite() ? kInfinitePatience
                                : static_cast<std::uint8_t>(std::min(t.value(), g_.degree(v)));
        }
        canonicalize(init);
        return value(init);
    }

private:
    void canonicalize(StateKey& s) const {
        // Drop edges whose endpoints have no patience left, then zero the
        // patience of vertices with no remaining available edges.
        bool changed = true;
        while (changed) {
            changed = false;
            for (int e = 0; e < g_.num_edges(); ++e) {
                if (!(s.avail >> e & 1u)) continue;
                if (s.pat[compact_[g_.edge(e).u]] == 0 || s.pat[compact_[g_.edge(e).v]] == 0) {
                    s.avail &= static_cast<std::uint16_t>(~(1u << e));
                    changed = true;
                }
            }
        }
        std::array<bool, 20> has_edge{};
        for (int e = 0; e < g_.num_edges(); ++e) {
            if (!(s.avail >> e & 1u)) continue;
            has_edge[compact_[g_.edge(e).u]] = true;
            has_edge[compact_[g_.edge(e).v]] = true;
        }
        for (int c = 0; c < num_compact_; ++c) {
            if (!has_edge[c]) s.pat[c] = 0;
        }
    }

    double value(const StateKey& s) {
        if (s.avail == 0) return 0.0;
        auto it = memo_.find(s);
        if (it != memo_.end()) return it->second;

        double best = 0.0;  // stopping is always allowed
        for (int e = 0; e < g_.num_edges(); ++e) {
            if (!(s.avail >> e & 1u)) continue;
            const Edge& ed = g_.edge(e);
            const int cu = compact_[ed.u], cv = compact_[ed.v];

            // Probe succeeds: both endpoints leave the pool.
            StateKey hit = s;
            hit.avail &= static_cast<std::uint16_t>(~(1u << e));
            for (int f = 0; f < g_.num_edges(); ++f) {
                if (!(hit.avail >> f & 1u)) continue;
                if (g_.edge(f).u == ed.u || g_.edge(f).v == ed.u || g_.edge(f).u == ed.v ||
                    g_.edge(f).v == ed.v) {
                    hit.avail &= static_cast<std::uint16_t>(~(1u << f));
                }
            }
            hit.pat[cu] = 0;
            hit.pat[cv] = 0;
            canonicalize(hit);

            // Probe fails: the edge is spent and both endpoints lose patience.
            StateKey miss = s;
            miss.avail &= static_cast<std::uint16_t>(~(1u << e));
            if (miss.pat[cu] != kInfinitePatience) --miss.pat[cu];
            if (miss.pat[cv] != kInfinitePatience) --miss.pat[cv];
            canonicalize(miss);

            const double val =
                ed.prob * (ed.weight + value(hit)) + (1.0 - ed.prob) * value(miss);
            best = std::max(best, val);
        }
        memo_.emplace(s, best);
        return best;
    }

    const StochasticGraph& g_;
    std::vector<int> compact_;
    int num_compact_ = 0;
    std::unordered_map<StateKey, double, StateKeyHash> memo_;
};

}  // namespace

double optimal_adaptive_value(const StochasticGraph& g) {
    if (g.num_edges() > kMaxOracleEdges) {
        throw ValidationError("optimal_adaptive_value: instance too large (" +
                              std::to_string(g.num_edges()) + " edges, cap is " +
                              std::to_string(kMaxOracleEdges) + ")");
    }
    if (g.num_edges() == 0) return 0.0;
    return AdaptiveDp(g).run();
}

RatioResult approximation_ratio(const StochasticGraph& g, double estimate, double estimate_ci) {
    const double opt = optimal_adaptive_value(g);
    RatioResult r;
    if (opt <= 0.0) {
        r.zero_opt = true;
        return r;
    }
    r.ratio = estimate / opt;
    r.ci = estimate_ci / opt;
    return r;
}

}  // namespace stochmatch
