#pragma once

#include <cstdint>
#include <string>

#include "stochmatch/graph.hpp"

namespace stochmatch {

// Deterministic instance generator: the output is a pure function of
// (params, seed).  Three families:
//
//   er    Erdos-Renyi over n vertices; each pair is an edge with prob q.
//   bip   random bipartite n1 x n2 (pair kept with prob q); side 1 can be
//         forced to unit patience for the bipartite pipeline.
//   star  the hard two-patience star: center with patience 2 and T+1 leaves;
//         edge 0 has p = 1/(T+1), edges 1..T have p = T/(T+1).
//
// Weights and activation probabilities are uniform in [w_min, w_max] and
// [p_min, p_max]; patience is infinite with prob `infinite_prob`, otherwise
// uniform on {t_min, ..., t_max}.
struct GeneratorParams {
    enum class Family { erdos_renyi, bipartite, star };

    Family family = Family::erdos_renyi;
    int n = 0;            // er
    int n1 = 0, n2 = 0;   // bip
    int star_t = 0;       // star: the parameter T
    double edge_prob = 0.5;
    double w_min = 1.0, w_max = 1.0;
    double p_min = 0.0, p_max = 1.0;
    int t_min = 1, t_max = 3;
    double infinite_prob = 0.0;
    bool unit_side1 = false;  // bip only
};

// Textual form used by the CLI --gen flag, e.g.
//   "er:n=8,q=0.4,pmin=0.1,pmax=0.9,wmin=0.5,wmax=2,tmin=1,tmax=3,pinf=0.25"
//   "bip:n1=4,n2=3,q=0.8,unit=1"
//   "star:T=10"
GeneratorParams parse_generator_spec(const std::string& spec);

StochasticGraph generate_instance(const GeneratorParams& params, std::uint64_t seed);

}  // namespace stochmatch
