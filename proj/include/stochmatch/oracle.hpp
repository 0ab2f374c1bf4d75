#pragma once

#include "stochmatch/graph.hpp"

namespace stochmatch {

// Exact expected weight of the optimal adaptive probing policy, by dynamic
// programming over (available edges, remaining patience) states.  The policy
// may stop at any time and probes any safe edge; a successful probe matches
// both endpoints irrevocably, a failed one consumes patience at both.
// Capped at |E| <= 10 (throws ValidationError beyond).
double optimal_adaptive_value(const StochasticGraph& g);

struct RatioResult {
    double ratio = 0.0;     // estimate / OPT
    double ci = 0.0;        // propagated half-width: estimate_ci / OPT
    bool zero_opt = false;  // OPT == 0, ratio undefined
};

// Compares a simulated expected-weight estimate against the adaptive optimum.
RatioResult approximation_ratio(const StochasticGraph& g, double estimate, double estimate_ci);

}  // namespace stochmatch
