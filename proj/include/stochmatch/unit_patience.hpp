#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stochmatch/graph.hpp"

namespace stochmatch {

// Bipartite instances whose side-1 vertices all have patience 1: after
// dependent rounding each side-1 vertex keeps at most one edge, so the
// rounded edges form disjoint stars centered on side 2.  Each center probes
// its star in decreasing weight order until an edge comes up active.

struct StarEdge {
    int edge = -1;
    double weight = 0.0;
    double z = 0.0;  // p_e * y_e
};

// Probing plan for one center: edges sorted by decreasing weight, ties by
// ascending edge id.
struct StarPlan {
    int center = -1;
    std::vector<StarEdge> edges;
};

// Plan over all of delta(center) with the fractional z = p*y; this is the
// object the analytic per-vertex bounds are stated on.
StarPlan make_star_plan(const StochasticGraph& g, int center, std::span<const double> y);

// Series lower bound on the expected matched weight at the center:
//   sum_i w_i z_i prod_{j<i} (1 - z_j)
// i.e. the value under independent edge survival, which correlated rounding
// can only improve.
double vertex_lower_bound(const StarPlan& plan);

struct OneMinusInvEReport {
    double lhs = 0.0;            // vertex_lower_bound(plan)
    double rhs = 0.0;            // (1 - 1/e) * sum_i w_i z_i
    double z_sum = 0.0;          // sum_i z_i
    bool hypothesis_ok = false;  // z_sum <= 1 + tol (matching-constraint hypothesis)
    bool holds = false;          // lhs >= rhs - tol
};

// The (1 - 1/e) comparison for one star.  A violated hypothesis is reported,
// not thrown: the inequality is only promised when z_sum <= 1.
OneMinusInvEReport check_one_minus_inv_e(const StarPlan& plan, double tol = 1e-9);

struct StarProbeResult {
    int matched_edge = -1;  // -1 when no probe succeeded
    int probes = 0;
    double weight = 0.0;
};

// Probe the center's rounded edges (rounded[e] == 1) in decreasing weight
// order, stopping at the first active edge or once the center's own patience
// is spent.  Activation draws are keyed (seed, rep, edge), so the result is a
// pure function of its arguments.
StarProbeResult probe_star(const StochasticGraph& g, int center,
                           std::span<const unsigned char> rounded, std::uint64_t seed,
                           std::uint64_t rep);

struct UnitPatienceRun {
    std::vector<int> matching;          // matched edge ids, ascending
    double total_weight = 0.0;          // sum of matched weights
    std::vector<double> vertex_weight;  // W(v) per vertex id; zero off side 2
};

// One full pipeline run: solve the LP, dependent-round y, then probe every
// side-2 star.  Throws if the graph has no all-unit-patience side.
UnitPatienceRun run_unit_patience(const StochasticGraph& g, std::uint64_t seed);

// Same pipeline with the LP solution supplied by the caller (one rounding and
// probing pass per call; rep separates replications under one seed).
UnitPatienceRun run_unit_patience(const StochasticGraph& g, const BipartitionWitness& witness,
                                  std::span<const double> y, std::uint64_t seed,
                                  std::uint64_t rep);

struct VertexStats {
    int vertex = -1;
    double opt = 0.0;          // sum over delta(v) of w_e z_e
    double lower_bound = 0.0;  // vertex_lower_bound of the full star plan
    double mean = 0.0;         // empirical E[W(v)]
    double ci = 0.0;           // 99% half-width
};

struct UnitPatienceStats {
    std::uint64_t reps = 0;
    double lp_objective = 0.0;
    double total_mean = 0.0;
    double total_ci = 0.0;
    std::vector<VertexStats> per_vertex;  // side-2 centers, ascending
};

// Monte Carlo over `reps` independent rounding+probing passes with the LP
// solved once.
UnitPatienceStats unit_patience_monte_carlo(const StochasticGraph& g, std::uint64_t reps,
                                            std::uint64_t seed);

}  // namespace stochmatch
