#include "stochmatch/unit_patience.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stochmatch/errors.hpp"
#include "stochmatch/lp.hpp"
#include "stochmatch/rng.hpp"
#include "stochmatch/rounding.hpp"

namespace stochmatch {

namespace {

constexpr double kZ99 = 2.5758293035489004;

// Decreasing weight, ties by ascending edge id.
void sort_star(std::vector<int>& edges, const StochasticGraph& g) {
    std::sort(edges.begin(), edges.end(), [&](int a, int b) {
        if (g.edge(a).weight != g.edge(b).weight) return g.edge(a).weight > g.edge(b).weight;
        return a < b;
    });
}

}  // namespace

StarPlan make_star_plan(const StochasticGraph& g, int center, std::span<const double> y) {
    if (center < 0 || center >= g.num_vertices()) {
        throw ValidationError("make_star_plan: vertex id out of range");
    }
    if (static_cast<int>(y.size()) != g.num_edges()) {
        throw ValidationError("make_star_plan: y has wrong dimension");
    }
    std::vector<int> order = g.incident(center);
    sort_star(order, g);

    StarPlan plan;
    plan.center = center;
    plan.edges.reserve(order.size());
    for (int e : order) {
        plan.edges.push_back({e, g.edge(e).weight, g.edge_z(e, y[e])});
    }
    return plan;
}

double vertex_lower_bound(const StarPlan& plan) {
    double sum = 0.0, survive = 1.0;
    for (const StarEdge& se : plan.edges) {
        sum += se.weight * se.z * survive;
        survive *= 1.0 - se.z;
    }
    return sum;
}

OneMinusInvEReport check_one_minus_inv_e(const StarPlan& plan, double tol) {
    OneMinusInvEReport report;
    double wz = 0.0;
    for (const StarEdge& se : plan.edges) {
        report.z_sum += se.z;
        wz += se.weight * se.z;
    }
    report.lhs = vertex_lower_bound(plan);
    report.rhs = (1.0 - std::exp(-1.0)) * wz;
    report.hypothesis_ok = report.z_sum <= 1.0 + tol;
    report.holds = report.lhs >= report.rhs - tol;
    return report;
}

StarProbeResult probe_star(const StochasticGraph& g, int center,
                           std::span<const unsigned char> rounded, std::uint64_t seed,
                           std::uint64_t rep) {
    if (static_cast<int>(rounded.size()) != g.num_edges()) {
        throw ValidationError("probe_star: rounded vector has wrong dimension");
    }
    std::vector<int> order;
    for (int e : g.incident(center)) {
        if (rounded[e]) order.push_back(e);
    }
    sort_star(order, g);

    const Patience& t = g.vertex(center).patience;
    const int budget = t.is_infinite() ? std::numeric_limits<int>::max() : t.value();

    StarProbeResult result;
    for (int e : order) {
        if (result.probes >= budget) break;
        ++result.probes;
        if (rng::bernoulli(g.edge(e).prob, seed, rep, static_cast<std::uint64_t>(e),
                           rng::Draw::activate)) {
            result.matched_edge = e;
            result.weight = g.edge(e).weight;
            break;
        }
    }
    return result;
}

UnitPatienceRun run_unit_patience(const StochasticGraph& g, const BipartitionWitness& witness,
                                  std::span<const double> y, std::uint64_t seed,
                                  std::uint64_t rep) {
    const RoundedVector rounded = dependent_round(g, y, rng::subseed(seed, rep, 1));

    UnitPatienceRun run;
    run.vertex_weight.assign(g.num_vertices(), 0.0);
    for (int center : witness.side2) {
        const StarProbeResult r = probe_star(g, center, rounded.values, seed, rep);
        if (r.matched_edge >= 0) {
            run.matching.push_back(r.matched_edge);
            run.vertex_weight[center] = r.weight;
            run.total_weight += r.weight;
        }
    }
    std::sort(run.matching.begin(), run.matching.end());
    return run;
}

UnitPatienceRun run_unit_patience(const StochasticGraph& g, std::uint64_t seed) {
    const BipartitionWitness witness = check_bipartite_unit_patience(g);
    const LpSolution lp = solve_lp(g);
    return run_unit_patience(g, witness, lp.y, seed, 0);
}

UnitPatienceStats unit_patience_monte_carlo(const StochasticGraph& g, std::uint64_t reps,
                                            std::uint64_t seed) {
    if (reps == 0) throw ValidationError("unit_patience_monte_carlo: reps must be positive");
    const BipartitionWitness witness = check_bipartite_unit_patience(g);
    const LpSolution lp = solve_lp(g);

    const size_t k = witness.side2.size();
    std::vector<double> sum(k, 0.0), sumsq(k, 0.0);
    double total_sum = 0.0, total_sumsq = 0.0;
    for (std::uint64_t rep = 0; rep < reps; ++rep) {
        const UnitPatienceRun run = run_unit_patience(g, witness, lp.y, seed, rep);
        for (size_t i = 0; i < k; ++i) {
            const double w = run.vertex_weight[witness.side2[i]];
            sum[i] += w;
            sumsq[i] += w * w;
        }
        total_sum += run.total_weight;
        total_sumsq += run.total_weight * run.total_weight;
    }

    const double n = static_cast<double>(reps);
    auto half_width = [&](double s, double sq) {
        if (reps < 2) return 0.0;
        const double mean = s / n;
        const double var = std::max(0.0, (sq - n * mean * mean) / (n - 1.0));
        return kZ99 * std::sqrt(var / n);
    };

    UnitPatienceStats stats;
    stats.reps = reps;
    stats.lp_objective = lp.objective;
    stats.total_mean = total_sum / n;
    stats.total_ci = half_width(total_sum, total_sumsq);
    stats.per_vertex.reserve(k);
    for (size_t i = 0; i < k; ++i) {
        const int center = witness.side2[i];
        const StarPlan plan = make_star_plan(g, center, lp.y);
        VertexStats vs;
        vs.vertex = center;
        for (const StarEdge& se : plan.edges) vs.opt += se.weight * se.z;
        vs.lower_bound = vertex_lower_bound(plan);
        vs.mean = sum[i] / n;
        vs.ci = half_width(sum[i], sumsq[i]);
        stats.per_vertex.push_back(vs);
    }
    return stats;
}

}  // namespace stochmatch
