#include <sstream>

#include "doctest.h"
#include "stochmatch/errors.hpp"
#include "stochmatch/generator.hpp"
#include "stochmatch/graph.hpp"
#include "stochmatch/instance_io.hpp"
#include "stochmatch/lp.hpp"
#include "stochmatch/patience.hpp"

using namespace stochmatch;

namespace {

StochasticGraph two_edge_star() {
    return StochasticGraph({{"c", Patience::finite(2)},
                            {"l0", Patience::finite(1)},
                            {"l1", Patience::finite(1)}},
                           {{0, 1, 1.0, 0.5}, {0, 2, 2.0, 0.25}});
}

}  // namespace

TEST_CASE("patience encodes finite budgets and the infinite sentinel") {
    const Patience t3 = Patience::finite(3);
    CHECK_FALSE(t3.is_infinite());
    CHECK(t3.value() == 3);
    CHECK(t3.to_string() == "3");
    CHECK(t3.at_least(3));
    CHECK_FALSE(t3.at_least(4));

    const Patience inf = Patience::infinite();
    CHECK(inf.is_infinite());
    CHECK(inf.to_string() == "inf");
    CHECK(inf.at_least(1000000));

    CHECK(Patience::finite(1) == Patience::finite(1));
    CHECK_FALSE(Patience::finite(1) == inf);
    CHECK_THROWS_AS(Patience::finite(0), ValidationError);
    CHECK_THROWS_AS(Patience::finite(-2), ValidationError);
}

TEST_CASE("graph construction validates all invariants") {
    CHECK_THROWS_AS(StochasticGraph({{"a", Patience::finite(1)}, {"a", Patience::finite(1)}}, {}),
                    ValidationError);
    CHECK_THROWS_AS(StochasticGraph({{"", Patience::finite(1)}}, {}), ValidationError);

    const std::vector<Vertex> ab{{"a", Patience::finite(1)}, {"b", Patience::finite(1)}};
    CHECK_THROWS_AS(StochasticGraph(ab, {{0, 0, 1.0, 0.5}}), ValidationError);  // self-loop
    CHECK_THROWS_AS(StochasticGraph(ab, {{0, 2, 1.0, 0.5}}), ValidationError);  // bad endpoint
    CHECK_THROWS_AS(StochasticGraph(ab, {{0, 1, -1.0, 0.5}}), ValidationError);
    CHECK_THROWS_AS(StochasticGraph(ab, {{0, 1, 1.0, 1.5}}), ValidationError);
    CHECK_THROWS_AS(StochasticGraph(ab, {{0, 1, 1.0, -0.1}}), ValidationError);

    // Parallel edges are legal (they arise from edge splitting).
    const StochasticGraph par(ab, {{0, 1, 1.0, 0.5}, {0, 1, 2.0, 0.25}});
    CHECK(par.num_edges() == 2);
    CHECK(par.degree(0) == 2);
}

TEST_CASE("incidence index is ascending and consistent") {
    const StochasticGraph g = two_edge_star();
    CHECK(g.incident(0) == std::vector<int>{0, 1});
    CHECK(g.incident(1) == std::vector<int>{0});
    CHECK(g.degree(0) == 2);
    CHECK(g.other_endpoint(0, 0) == 1);
    CHECK(g.other_endpoint(0, 1) == 0);
    CHECK(g.edge_z(1, 0.8) == doctest::Approx(0.2));
}

TEST_CASE("bipartite witness puts the unit-patience side first") {
    const StochasticGraph g = two_edge_star();
    const BipartitionWitness w = check_bipartite_unit_patience(g);
    CHECK(w.side1 == std::vector<int>{1, 2});  // leaves, unit patience
    CHECK(w.side2 == std::vector<int>{0});
    CHECK(w.side_of[0] == 2);
    CHECK(w.side_of[1] == 1);
}

TEST_CASE("bipartite witness prefers the class of the smallest vertex when both qualify") {
    const StochasticGraph g({{"a", Patience::finite(1)}, {"b", Patience::finite(1)}},
                            {{0, 1, 1.0, 0.5}});
    const BipartitionWitness w = check_bipartite_unit_patience(g);
    CHECK(w.side1 == std::vector<int>{0});
    CHECK(w.side2 == std::vector<int>{1});
}

TEST_CASE("bipartite witness orients components independently") {
    // Component 1: unit side is {a2}; component 2: unit side is {b1}.
    const StochasticGraph g(
        {{"a1", Patience::finite(2)},
         {"a2", Patience::finite(1)},
         {"b1", Patience::finite(1)},
         {"b2", Patience::finite(3)}},
        {{0, 1, 1.0, 0.5}, {2, 3, 1.0, 0.5}});
    const BipartitionWitness w = check_bipartite_unit_patience(g);
    CHECK(w.side1 == std::vector<int>{1, 2});
    CHECK(w.side2 == std::vector<int>{0, 3});
}

TEST_CASE("bipartite witness failure modes") {
    const std::vector<Vertex> tri{{"a", Patience::finite(1)},
                                  {"b", Patience::finite(1)},
                                  {"c", Patience::finite(1)}};
    const StochasticGraph triangle(tri, {{0, 1, 1, 1}, {1, 2, 1, 1}, {0, 2, 1, 1}});
    CHECK_THROWS_WITH_AS(check_bipartite_unit_patience(triangle), "not bipartite",
                         ValidationError);

    const StochasticGraph no_unit({{"a", Patience::finite(2)}, {"b", Patience::finite(2)}},
                                  {{0, 1, 1.0, 0.5}});
    CHECK_THROWS_WITH_AS(check_bipartite_unit_patience(no_unit), "no all-unit-patience side",
                         ValidationError);
}

TEST_CASE("split_edge produces a p=0 copy in place and a p=1 copy at the end") {
    const StochasticGraph g = two_edge_star();
    const SplitResult s = split_edge(g, 0);
    CHECK(s.zero_prob_edge == 0);
    CHECK(s.unit_prob_edge == 2);
    CHECK(s.original_prob == doctest::Approx(0.5));
    CHECK(s.graph.num_edges() == 3);
    CHECK(s.graph.edge(0).prob == 0.0);
    CHECK(s.graph.edge(2).prob == 1.0);
    CHECK(s.graph.edge(0).weight == doctest::Approx(1.0));
    CHECK(s.graph.edge(2).weight == doctest::Approx(1.0));
    CHECK(s.graph.edge(2).u == g.edge(0).u);
    CHECK(s.graph.edge(2).v == g.edge(0).v);
    CHECK(s.graph.edge(1).prob == doctest::Approx(0.25));  // untouched edge keeps its id

    // Splitting is only defined for interior probabilities.
    const StochasticGraph ends({{"a", Patience::finite(1)}, {"b", Patience::finite(1)}},
                               {{0, 1, 1.0, 0.0}, {0, 1, 1.0, 1.0}});
    CHECK_THROWS_AS(split_edge(ends, 0), ValidationError);
    CHECK_THROWS_AS(split_edge(ends, 1), ValidationError);
}

TEST_CASE("map_y_after_split preserves y-mass, z-mass, and feasibility") {
    const StochasticGraph g = two_edge_star();
    const std::vector<double> y{0.8, 0.6};
    const SplitResult s = split_edge(g, 0);
    const std::vector<double> my = map_y_after_split(s, y);
    REQUIRE(my.size() == 3);
    CHECK(my[0] == doctest::Approx(0.8 * 0.5));  // p=0 copy
    CHECK(my[2] == doctest::Approx(0.8 * 0.5));  // p=1 copy
    CHECK(my[1] == doctest::Approx(0.6));
    // z-mass at the shared endpoint is unchanged.
    CHECK(s.graph.edge_z(0, my[0]) + s.graph.edge_z(2, my[2]) == doctest::Approx(0.5 * 0.8));

    CHECK(check_feasibility(g, y, 1e-9).feasible());
    CHECK(check_feasibility(s.graph, my, 1e-9).feasible());
}

TEST_CASE("instance files round-trip exactly") {
    const StochasticGraph g({{"left", Patience::finite(2)},
                             {"right", Patience::infinite()}},
                            {{0, 1, 2.5, 0.75}});
    const std::string text = format_instance(g);
    std::istringstream in(text);
    const StochasticGraph back = load_instance(in, "roundtrip");
    CHECK(back.num_vertices() == 2);
    CHECK(back.vertex(0).name == "left");
    CHECK(back.vertex(0).patience == Patience::finite(2));
    CHECK(back.vertex(1).patience == Patience::infinite());
    CHECK(back.edge(0).weight == doctest::Approx(2.5));
    CHECK(back.edge(0).prob == doctest::Approx(0.75));
    CHECK(format_instance(back) == text);
}

TEST_CASE("instance parsing rejects malformed input") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return load_instance(in, "test");
    };
    CHECK_THROWS_AS(parse("not json"), ParseError);
    CHECK_THROWS_AS(parse("[]"), ParseError);
    CHECK_THROWS_AS(parse(R"({"vertices": [], "edges": [], "extra": 1})"), ParseError);
    CHECK_THROWS_AS(parse(R"({"vertices": []})"), ParseError);  // missing edges
    CHECK_THROWS_AS(parse(R"({"vertices": [{"id": "a"}], "edges": []})"),
                    ParseError);  // missing patience
    CHECK_THROWS_AS(parse(R"({"vertices": [{"id": "a", "patience": 0}], "edges": []})"),
                    ParseError);
    CHECK_THROWS_AS(parse(R"({"vertices": [{"id": "a", "patience": "forever"}], "edges": []})"),
                    ParseError);
    CHECK_THROWS_AS(
        parse(R"({"vertices": [{"id": "a", "patience": 1, "color": "red"}], "edges": []})"),
        ParseError);
    CHECK_THROWS_AS(
        parse(R"({"vertices": [{"id": "a", "patience": 1}],
                  "edges": [{"u": "a", "v": "missing", "w": 1, "p": 0.5}]})"),
        ParseError);
    // Semantically invalid graphs surface the graph validator's error.
    CHECK_THROWS_AS(
        parse(R"({"vertices": [{"id": "a", "patience": 1}, {"id": "b", "patience": 1}],
                  "edges": [{"u": "a", "v": "b", "w": 1, "p": 1.5}]})"),
        ValidationError);
    // "inf" is the only accepted non-integer patience.
    const StochasticGraph g =
        parse(R"({"vertices": [{"id": "a", "patience": "inf"}], "edges": []})");
    CHECK(g.vertex(0).patience.is_infinite());
}

TEST_CASE("generator is a pure function of spec and seed") {
    const GeneratorParams p = parse_generator_spec("er:n=8,q=0.4,wmin=1,wmax=3,pmin=0.2,pmax=0.9");
    const StochasticGraph a = generate_instance(p, 11);
    const StochasticGraph b = generate_instance(p, 11);
    const StochasticGraph c = generate_instance(p, 12);
    CHECK(format_instance(a) == format_instance(b));
    CHECK(format_instance(a) != format_instance(c));
    for (int e = 0; e < a.num_edges(); ++e) {
        CHECK(a.edge(e).weight >= 1.0);
        CHECK(a.edge(e).weight <= 3.0);
        CHECK(a.edge(e).prob >= 0.2);
        CHECK(a.edge(e).prob <= 0.9);
    }
}

TEST_CASE("generator families produce the advertised shapes") {
    const StochasticGraph empty = generate_instance(parse_generator_spec("er:n=0"), 1);
    CHECK(empty.num_vertices() == 0);
    CHECK(empty.num_edges() == 0);

    const StochasticGraph bip =
        generate_instance(parse_generator_spec("bip:n1=3,n2=2,q=1,unit=1"), 3);
    CHECK(bip.num_vertices() == 5);
    CHECK(bip.num_edges() == 6);
    for (int v = 0; v < 3; ++v) CHECK(bip.vertex(v).patience == Patience::finite(1));
    CHECK_NOTHROW(check_bipartite_unit_patience(bip));

    // The hard star: T+1 unit-weight edges, a tiny-probability target edge 0
    // and T heavy blockers, all sharing the patience-2 center.
    const StochasticGraph star = generate_instance(parse_generator_spec("star:T=10"), 0);
    CHECK(star.num_vertices() == 12);
    CHECK(star.num_edges() == 11);
    CHECK(star.vertex(0).patience == Patience::finite(2));
    CHECK(star.edge(0).prob == doctest::Approx(1.0 / 11.0));
    for (int e = 1; e <= 10; ++e) {
        CHECK(star.edge(e).prob == doctest::Approx(10.0 / 11.0));
        CHECK(star.edge(e).weight == doctest::Approx(1.0));
        CHECK(star.vertex(star.edge(e).v).patience == Patience::finite(1));
    }
}

TEST_CASE("generator spec parsing rejects unknown families and keys") {
    CHECK_THROWS_AS(parse_generator_spec("ring:n=4"), ParseError);
    CHECK_THROWS_AS(parse_generator_spec("er:n=4,bogus=1"), ParseError);
    CHECK_THROWS_AS(parse_generator_spec("er:n=abc"), ParseError);
    CHECK_THROWS_AS(parse_generator_spec("er:n"), ParseError);
    CHECK_THROWS_AS(generate_instance(parse_generator_spec("er:n=-1"), 0), ValidationError);
    CHECK_THROWS_AS(generate_instance(parse_generator_spec("er:n=4,q=1.5"), 0), ValidationError);
    CHECK_THROWS_AS(generate_instance(parse_generator_spec("star:T=0"), 0), ValidationError);
}
