#include <algorithm>
#include <climits>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "stochmatch/errors.hpp"
#include "stochmatch/generator.hpp"
#include "stochmatch/graph.hpp"
#include "stochmatch/probing.hpp"

using namespace stochmatch;

namespace {

StochasticGraph two_edge_star(int center_patience) {
    return StochasticGraph({{"c", Patience::finite(center_patience)},
                            {"l0", Patience::finite(1)},
                            {"l1", Patience::finite(1)}},
                           {{0, 1, 1.0, 0.5}, {0, 2, 1.0, 0.6}});
}

// Replays a trace and asserts the process invariants hold at every step.
void audit_trace(const StochasticGraph& g, const ProbeTrace& tr) {
    REQUIRE(static_cast<int>(tr.arrival_order.size()) == g.num_edges());
    std::vector<int> sorted = tr.arrival_order;
    std::sort(sorted.begin(), sorted.end());
    for (int e = 0; e < g.num_edges(); ++e) REQUIRE(sorted[e] == e);  // a permutation

    std::vector<int> budget(g.num_vertices());
    std::vector<char> matched(g.num_vertices(), 0);
    for (int v = 0; v < g.num_vertices(); ++v) {
        budget[v] = g.vertex(v).patience.is_infinite() ? INT_MAX
                                                       : g.vertex(v).patience.value();
    }
    double weight = 0.0;
    for (int e : tr.arrival_order) {
        const Edge& ed = g.edge(e);
        const bool safe = !matched[ed.u] && !matched[ed.v] && budget[ed.u] > 0 && budget[ed.v] > 0;
        const EdgeOutcome out = tr.outcome[e];
        if (!safe) {
            REQUIRE(out == EdgeOutcome::not_reached_safe);
            continue;
        }
        REQUIRE(out != EdgeOutcome::not_reached_safe);
        if (out == EdgeOutcome::skipped_y) {
            REQUIRE(tr.y_bit[e] == 0);
            continue;
        }
        REQUIRE(tr.y_bit[e] == 1);
        if (out == EdgeOutcome::skipped_a) {
            REQUIRE(tr.a_bit[e] == 0);
            continue;
        }
        REQUIRE(tr.a_bit[e] == 1);
        // A probe burns patience at both endpoints no matter the outcome.
        if (budget[ed.u] != INT_MAX) --budget[ed.u];
        if (budget[ed.v] != INT_MAX) --budget[ed.v];
        if (out == EdgeOutcome::probed_active) {
            matched[ed.u] = matched[ed.v] = 1;
            weight += ed.weight;
            REQUIRE(std::find(tr.matching.begin(), tr.matching.end(), e) != tr.matching.end());
        }
    }
    REQUIRE(tr.matched_weight == doctest::Approx(weight));
    // The matching is a matching.
    std::vector<char> used(g.num_vertices(), 0);
    for (int e : tr.matching) {
        REQUIRE_FALSE(used[g.edge(e).u]);
        REQUIRE_FALSE(used[g.edge(e).v]);
        used[g.edge(e).u] = used[g.edge(e).v] = 1;
    }
}

}  // namespace

TEST_CASE("traces satisfy the process invariants on random instances") {
    const GeneratorParams params =
        parse_generator_spec("er:n=8,q=0.5,tmin=1,tmax=3,pinf=0.2,pmin=0.1,pmax=1");
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const StochasticGraph g = generate_instance(params, 50 + seed);
        std::vector<double> y(g.num_edges());
        for (int e = 0; e < g.num_edges(); ++e) {
            y[e] = 0.9 / std::max(1, std::max(g.degree(g.edge(e).u), g.degree(g.edge(e).v)));
        }
        audit_trace(g, attenuate_match(g, y, AttenuationSpec::exponential(0.5), seed));
        audit_trace(g, attenuate_match(g, y, AttenuationSpec::none(), seed + 1000));
    }
}

TEST_CASE("attenuate_match is deterministic in the seed") {
    const StochasticGraph g = two_edge_star(2);
    const std::vector<double> y{0.8, 0.7};
    const ProbeTrace a = attenuate_match(g, y, AttenuationSpec::balanced(), 7);
    const ProbeTrace b = attenuate_match(g, y, AttenuationSpec::balanced(), 7);
    CHECK(a.arrival_order == b.arrival_order);
    CHECK(a.outcome == b.outcome);
    CHECK(a.matching == b.matching);
    bool differs = false;
    for (std::uint64_t s = 8; s < 16 && !differs; ++s) {
        differs = attenuate_match(g, y, AttenuationSpec::balanced(), s).outcome != a.outcome;
    }
    CHECK(differs);
}

TEST_CASE("infeasible y is rejected up front") {
    const StochasticGraph g = two_edge_star(1);
    CHECK_THROWS_AS(attenuate_match(g, std::vector<double>{1.0, 1.0}, AttenuationSpec::none(), 1),
                    ValidationError);  // patience row: y-mass 2 > 1
    CHECK_THROWS_AS(attenuate_match(g, std::vector<double>{1.5, 0.0}, AttenuationSpec::none(), 1), ValidationError);
    CHECK_THROWS_AS(attenuate_match(g, std::vector<double>{0.5}, AttenuationSpec::none(), 1), ValidationError);
    CHECK_THROWS_AS(monte_carlo(g, std::vector<double>{1.0, 1.0}, AttenuationSpec::none(), 10, 1), ValidationError);
    CHECK_THROWS_AS(exact_probe_probabilities(g, std::vector<double>{1.0, 1.0}, AttenuationSpec::none()),
                    ValidationError);
}

TEST_CASE("exact probabilities: two-edge star without attenuation") {
    // Patience 1 center, y = (0.4, 0.6), no attenuation.  Edge e is probed
    // iff Y_e = 1 and the rival did not probe first, so
    // Pr[probe e] = y_e (1 - y_rival / 2); activation never matters because
    // the center can probe only once either way.
    const StochasticGraph g = two_edge_star(1);
    const std::vector<double> probs =
        exact_probe_probabilities(g, std::vector<double>{0.4, 0.6}, AttenuationSpec::none());
    CHECK(probs[0] == doctest::Approx(0.4 * (1 - 0.3)).epsilon(1e-12));
    CHECK(probs[1] == doctest::Approx(0.6 * (1 - 0.2)).epsilon(1e-12));
    CHECK(probs[0] == doctest::Approx(0.28).epsilon(1e-12));
    CHECK(probs[1] == doctest::Approx(0.48).epsilon(1e-12));
}

TEST_CASE("exact probabilities: attenuation multiplies into the effective rate") {
    // Deterministic two-edge star (p = 1) with exp(0.5): the effective rate
    // is q_e = y_e * exp(-y_e / 2) and Pr[probe e] = q_e (1 - q_rival / 2).
    const StochasticGraph g({{"c", Patience::finite(1)},
                             {"l0", Patience::finite(1)},
                             {"l1", Patience::finite(1)}},
                            {{0, 1, 1.0, 1.0}, {0, 2, 1.0, 1.0}});
    const std::vector<double> y{0.4, 0.6};
    const double q0 = 0.4 * std::exp(-0.5 * 0.4);
    const double q1 = 0.6 * std::exp(-0.5 * 0.6);
    const std::vector<double> probs =
        exact_probe_probabilities(g, y, AttenuationSpec::exponential(0.5));
    CHECK(probs[0] == doctest::Approx(q0 * (1 - q1 / 2)).epsilon(1e-12));
    CHECK(probs[1] == doctest::Approx(q1 * (1 - q0 / 2)).epsilon(1e-12));
    // Frozen values, derived independently from the closed form.
    CHECK(probs[0] == doctest::Approx(0.254708622066).epsilon(1e-10));
    CHECK(probs[1] == doctest::Approx(0.371707253244).epsilon(1e-10));
}

TEST_CASE("exact probabilities: patience-2 center sees both edges") {
    // p = (0.5, 0.5), y = (1, 1), patience-2 center: an edge is always
    // probed unless the rival arrived first AND activated, so each has
    // Pr[probe] = 1 - p/2 = 0.75.
    const StochasticGraph g({{"c", Patience::finite(2)},
                             {"l0", Patience::finite(1)},
                             {"l1", Patience::finite(1)}},
                            {{0, 1, 1.0, 0.5}, {0, 2, 1.0, 0.5}});
    const std::vector<double> probs =
        exact_probe_probabilities(g, std::vector<double>{1.0, 1.0}, AttenuationSpec::none());
    CHECK(probs[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(probs[1] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("exact probabilities: path blocked through a unit-patience middle vertex") {
    // a - b - c with t_b = 1, y = (0.5, 0.5), p = (0.5, 0.5).  A probe burns
    // b's patience even when the edge comes up inactive, so the later edge is
    // blocked by the mere probe: Pr[probe e] = y_e (1 - y_rival / 2) = 0.375.
    // If blocking required activation the answer would be
    // y (1 - y p / 2) = 0.4375 -- this case pins down the semantics.
    const StochasticGraph g({{"a", Patience::finite(1)},
                             {"b", Patience::finite(1)},
                             {"c", Patience::finite(1)}},
                            {{0, 1, 1.0, 0.5}, {1, 2, 1.0, 0.5}});
    const std::vector<double> probs =
        exact_probe_probabilities(g, std::vector<double>{0.5, 0.5}, AttenuationSpec::none());
    CHECK(probs[0] == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(probs[1] == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("exact probabilities: equal k-star closed form") {
    // k equal edges at a unit-patience center: Pr[probe e] = (1-(1-q)^k)/k
    // with q = y * a~(z).  Balanced attenuation, k = 8, y = 1/8 each.
    std::vector<Vertex> vs{{"c", Patience::finite(1)}};
    std::vector<Edge> es;
    for (int i = 0; i < 8; ++i) {
        vs.push_back({"l" + std::to_string(i), Patience::finite(1)});
        es.push_back({0, i + 1, 1.0, 0.8});
    }
    const StochasticGraph g(vs, es);
    const std::vector<double> y(8, 0.125);
    const double q = 0.125 * evaluate(AttenuationSpec::balanced(), 0.8 * 0.125);
    const double expect = (1 - std::pow(1 - q, 8)) / 8;
    const std::vector<double> probs =
        exact_probe_probabilities(g, y, AttenuationSpec::balanced());
    for (int e = 0; e < 8; ++e) CHECK(probs[e] == doctest::Approx(expect).epsilon(1e-10));
    CHECK(probs[0] == doctest::Approx(0.079978096976609).epsilon(1e-10));
}

TEST_CASE("exact probabilities refuse oversized instances") {
    const StochasticGraph g = generate_instance(parse_generator_spec("star:T=8"), 1);
    REQUIRE(g.num_edges() == 9);
    CHECK_THROWS_WITH_AS(
        exact_probe_probabilities(g, std::vector<double>(9, 0.1), AttenuationSpec::none()),
        "exact_probe_probabilities: instance too large (9 edges, cap is 8)", ValidationError);
}

TEST_CASE("monte carlo agrees with the exact distribution") {
    const StochasticGraph g = two_edge_star(2);
    const std::vector<double> y{0.9, 0.8};
    const AttenuationSpec spec = AttenuationSpec::linear(0.5);
    const std::vector<double> exact = exact_probe_probabilities(g, y, spec);
    const SimResult sim = monte_carlo(g, y, spec, 200000, 42);
    REQUIRE(sim.reps == 200000);
    for (int e = 0; e < 2; ++e) {
        CAPTURE(e);
        // 99% CI half-width, stretched to ~4 standard errors.
        const double four_se = sim.probe_ci[e] * 4.0 / 2.5758293035489004;
        CHECK(std::abs(sim.probe_rate[e] - exact[e]) <= four_se);
        CHECK(sim.probe_rate[e] ==
              doctest::Approx(static_cast<double>(sim.probe_count[e]) / 200000.0));
        CHECK(sim.match_count[e] <= sim.probe_count[e]);
    }
    CHECK(sim.mean_weight > 0.0);
    CHECK(sim.weight_ci > 0.0);
}

TEST_CASE("monte carlo results do not depend on the worker count") {
    const StochasticGraph g = generate_instance(
        parse_generator_spec("er:n=7,q=0.6,tmin=1,tmax=2"), 3);
    std::vector<double> y(g.num_edges());
    for (int e = 0; e < g.num_edges(); ++e) {
        y[e] = 0.9 / std::max(1, std::max(g.degree(g.edge(e).u), g.degree(g.edge(e).v)));
    }
    const SimResult one = monte_carlo(g, y, AttenuationSpec::exponential(0.5), 30000, 5, 1);
    const SimResult four = monte_carlo(g, y, AttenuationSpec::exponential(0.5), 30000, 5, 4);
    CHECK(one.probe_count == four.probe_count);
    CHECK(one.match_count == four.match_count);
    CHECK(one.mean_weight == four.mean_weight);
    CHECK(one.weight_ci == four.weight_ci);
}

TEST_CASE("star baseline control matches the symmetric-order selectability") {
    // With T blockers the symmetric-order probing selectability of the target
    // edge is (T+2)/(2(T+1)): 3/4 at T=1, 6/11 at T=10, tending to 1/2.
    const BaselineResult t1 = star_counterexample_baseline(1, 400000, 9);
    CHECK(t1.z0 == doctest::Approx(0.5));
    CHECK(std::abs(t1.selectability - 0.75) <= t1.ci * 4.0 / 2.5758293035489004);

    const BaselineResult t10 = star_counterexample_baseline(10, 400000, 9);
    CHECK(t10.z0 == doctest::Approx(1.0 / 11.0));
    CHECK(std::abs(t10.selectability - 6.0 / 11.0) <= t10.ci * 4.0 / 2.5758293035489004);
    CHECK(t10.match_prob == doctest::Approx(t10.selectability * t10.z0));

    // The limit dips below 1 - 1/e, which is the whole point of the family.
    const BaselineResult t100 = star_counterexample_baseline(100, 400000, 9);
    CHECK(t100.selectability < 1 - std::exp(-1.0));
    CHECK(std::abs(t100.selectability - 102.0 / 202.0) <= t100.ci * 4.0 / 2.5758293035489004);
}
