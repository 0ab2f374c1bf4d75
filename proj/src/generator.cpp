#include "stochmatch/generator.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "stochmatch/errors.hpp"
#include "stochmatch/rng.hpp"

namespace stochmatch {

namespace {

void validate_params(const GeneratorParams& p) {
    auto check = [](bool ok, const char* msg) {
        if (!ok) throw ValidationError(std::string("generator: ") + msg);
    };
    check(p.edge_prob >= 0.0 && p.edge_prob <= 1.0, "edge probability q outside [0, 1]");
    check(p.w_min >= 0.0 && p.w_min <= p.w_max, "invalid weight range");
    check(p.p_min >= 0.0 && p.p_max <= 1.0 && p.p_min <= p.p_max,
          "invalid activation probability range");
    check(p.t_min >= 1 && p.t_min <= p.t_max, "invalid patience range");
    check(p.infinite_prob >= 0.0 && p.infinite_prob <= 1.0,
          "infinite-patience probability outside [0, 1]");
    switch (p.family) {
        case GeneratorParams::Family::erdos_renyi:
            check(p.n >= 0, "n must be non-negative");
            break;
        case GeneratorParams::Family::bipartite:
            check(p.n1 >= 0 && p.n2 >= 0, "n1 and n2 must be non-negative");
            break;
        case GeneratorParams::Family::star:
            check(p.star_t >= 1, "star parameter T must be at least 1");
            break;
    }
}

double uniform_in(double lo, double hi, std::uint64_t seed, std::uint64_t unit, rng::Draw kind) {
    return lo + (hi - lo) * rng::uniform01(seed, 0, unit, kind);
}

Patience draw_patience(const GeneratorParams& p, std::uint64_t seed, std::uint64_t vertex) {
    if (p.infinite_prob > 0.0 &&
        rng::bernoulli(p.infinite_prob, seed, 0, vertex, rng::Draw::gen_misc)) {
        return Patience::infinite();
    }
    const auto span = static_cast<std::uint64_t>(p.t_max - p.t_min + 1);
    const int t = p.t_min + static_cast<int>(rng::uniform_index(span, seed, 0, vertex,
                                                                rng::Draw::gen_patience));
    return Patience::finite(t);
}

StochasticGraph generate_er(const GeneratorParams& p, std::uint64_t seed) {
    std::vector<Vertex> vertices;
    vertices.reserve(p.n);
    for (int i = 0; i < p.n; ++i) {
        vertices.push_back({"v" + std::to_string(i), draw_patience(p, seed, i)});
    }
    std::vector<Edge> edges;
    std::uint64_t pair_index = 0;
    for (int i = 0; i < p.n; ++i) {
        for (int j = i + 1; j < p.n; ++j, ++pair_index) {
            if (!rng::bernoulli(p.edge_prob, seed, 0, pair_index, rng::Draw::gen_topology)) {
                continue;
            }
            Edge e;
            e.u = i;
            e.v = j;
            e.weight = uniform_in(p.w_min, p.w_max, seed, pair_index, rng::Draw::gen_weight);
            e.prob = uniform_in(p.p_min, p.p_max, seed, pair_index, rng::Draw::gen_prob);
            edges.push_back(e);
        }
    }
    return StochasticGraph(std::move(vertices), std::move(edges));
}

StochasticGraph generate_bipartite(const GeneratorParams& p, std::uint64_t seed) {
    std::vector<Vertex> vertices;
    vertices.reserve(p.n1 + p.n2);
    for (int i = 0; i < p.n1; ++i) {
        Patience t = p.unit_side1 ? Patience::finite(1) : draw_patience(p, seed, i);
        vertices.push_back({"a" + std::to_string(i), t});
    }
    for (int j = 0; j < p.n2; ++j) {
        vertices.push_back({"b" + std::to_string(j), draw_patience(p, seed, p.n1 + j)});
    }
    std::vector<Edge> edges;
    std::uint64_t pair_index = 0;
    for (int i = 0; i < p.n1; ++i) {
        for (int j = 0; j < p.n2; ++j, ++pair_index) {
            if (!rng::bernoulli(p.edge_prob, seed, 0, pair_index, rng::Draw::gen_topology)) {
                continue;
            }
            Edge e;
            e.u = i;
            e.v = p.n1 + j;
            e.weight = uniform_in(p.w_min, p.w_max, seed, pair_index, rng::Draw::gen_weight);
            e.prob = uniform_in(p.p_min, p.p_max, seed, pair_index, rng::Draw::gen_prob);
            edges.push_back(e);
        }
    }
    return StochasticGraph(std::move(vertices), std::move(edges));
}

// The star that separates order-aware probing from symmetric-order probing:
// with the companion fractional solution (y_0 = 1, y_i = 1/T) all T+1 edges
// have z_e = 1/(T+1), yet a symmetric random order selects edge 0 with
// probability only (T+2)/(2(T+1)) times z_0.
StochasticGraph generate_star(const GeneratorParams& p, std::uint64_t /*seed*/) {
    const int T = p.star_t;
    std::vector<Vertex> vertices;
    vertices.reserve(T + 2);
    vertices.push_back({"c", Patience::finite(2)});
    for (int i = 0; i <= T; ++i) {
        vertices.push_back({"l" + std::to_string(i), Patience::finite(1)});
    }
    std::vector<Edge> edges;
    edges.reserve(T + 1);
    const double tp1 = T + 1;
    for (int i = 0; i <= T; ++i) {
        Edge e;
        e.u = 0;
        e.v = 1 + i;
        e.weight = 1.0;
        e.prob = (i == 0) ? 1.0 / tp1 : T / tp1;
        edges.push_back(e);
    }
    return StochasticGraph(std::move(vertices), std::move(edges));
}

}  // namespace

GeneratorParams parse_generator_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string family = spec.substr(0, colon);
    GeneratorParams p;
    if (family == "er") {
        p.family = GeneratorParams::Family::erdos_renyi;
    } else if (family == "bip") {
        p.family = GeneratorParams::Family::bipartite;
    } else if (family == "star") {
        p.family = GeneratorParams::Family::star;
    } else {
        throw ParseError("generator spec '" + spec + "': unknown family '" + family + "'");
    }

    std::map<std::string, std::string> kv;
    if (colon != std::string::npos) {
        std::stringstream rest(spec.substr(colon + 1));
        std::string item;
        while (std::getline(rest, item, ',')) {
            if (item.empty()) continue;
            const auto eq = item.find('=');
            if (eq == std::string::npos) {
                throw ParseError("generator spec '" + spec + "': expected key=value, got '" +
                                 item + "'");
            }
            kv[item.substr(0, eq)] = item.substr(eq + 1);
        }
    }

    auto take_int = [&](const char* key, int& out) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        try {
            out = std::stoi(it->second);
        } catch (const std::exception&) {
            throw ParseError(std::string("generator spec: bad integer for '") + key + "'");
        }
        kv.erase(it);
    };
    auto take_double = [&](const char* key, double& out) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        try {
            out = std::stod(it->second);
        } catch (const std::exception&) {
            throw ParseError(std::string("generator spec: bad number for '") + key + "'");
        }
        kv.erase(it);
    };

    take_int("n", p.n);
    take_int("n1", p.n1);
    take_int("n2", p.n2);
    take_int("T", p.star_t);
    take_double("q", p.edge_prob);
    take_double("wmin", p.w_min);
    take_double("wmax", p.w_max);
    take_double("pmin", p.p_min);
    take_double("pmax", p.p_max);
    take_int("tmin", p.t_min);
    take_int("tmax", p.t_max);
    take_double("pinf", p.infinite_prob);
    int unit = p.unit_side1 ? 1 : 0;
    take_int("unit", unit);
    p.unit_side1 = unit != 0;

    if (!kv.empty()) {
        throw ParseError("generator spec '" + spec + "': unknown key '" + kv.begin()->first + "'");
    }
    return p;
}

StochasticGraph generate_instance(const GeneratorParams& params, std::uint64_t seed) {
    validate_params(params);
    switch (params.family) {
        case GeneratorParams::Family::erdos_renyi:
            return generate_er(params, seed);
        case GeneratorParams::Family::bipartite:
            return generate_bipartite(params, seed);
        case GeneratorParams::Family::star:
            return generate_star(params, seed);
    }
    throw ValidationError("generator: unreachable family");
}

}  // namespace stochmatch
