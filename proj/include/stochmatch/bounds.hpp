#pragma once

#include <vector>

#include "stochmatch/attenuation.hpp"
#include "stochmatch/graph.hpp"
#include "stochmatch/quadrature.hpp"

namespace stochmatch {

// Patience threshold above which the closed-form Poisson factor is replaced
// by the Chernoff-Hoeffding surrogate in the worst-case analysis.
inline constexpr int kChernoffPatience = 48;

// g_t(x) = Pr[T <= t-1] for T ~ Poisson(x (t-1)); g_1 = g_inf = 1.  This is
// the probability that a vertex of patience t still has probes left at
// relative time x in the worst case.  Computed by log-space term recursion
// with compensated summation.
double poisson_factor(Patience t, double x);

// Per-edge selectability lower bound
//     a~(z) * Integral_0^1 prod_endpoints [ e^{-x(1-z)} g_t(x) ] dx,
// where an isolated endpoint (no competing edges) contributes no factor at
// all -- that is the star case, which for the balanced family evaluates to
// exactly 1 - 1/e for every z.
struct BoundQuery {
    Patience t_u = Patience::infinite();
    Patience t_v = Patience::infinite();
    double z = 0.0;
    AttenuationSpec atten;
    bool u_isolated = false;
    bool v_isolated = false;
};

double guarantee_factor(const BoundQuery& q, const QuadratureParams& params = {});

// Surrogate used when at least one patience is >= kChernoffPatience: the
// Poisson factor of any such endpoint is replaced by
//     h_t(x) = 1 - exp(-eps^2 x (t-1) / (2 + eps)),   eps = (1-x)/x,
// with the x -> 1 limit (bracket -> 0) handled explicitly.  Requires
// max(t_u, t_v) >= kChernoffPatience.
double chernoff_factor(Patience t_u, Patience t_v, double z,
                       const QuadratureParams& params = {});

struct WorstCase {
    double value = 0.0;
    Patience t_u = Patience::finite(1);
    Patience t_v = Patience::finite(1);
    double z = 0.0;
};

// Grid minimization of guarantee_factor over t_u <= t_v in {1..t_max, inf}
// and z on a uniform z_steps grid over [0, 1].
WorstCase worst_case_search(const AttenuationSpec& spec, int t_max = 47, int z_steps = 101,
                            const QuadratureParams& params = {});

// Hard instance family for patience t: a target edge {u, v} with z = eps
// (p = 1, y = eps), plus per endpoint t-1 "timeout" edges (p = 0, y = 1) and
// n_blockers "blocker" edges (p = 1, y = (1-eps)/n_blockers).  The companion
// y saturates both constraints at u and v, so the target's probe rate
// approaches the worst-case guarantee as eps -> 0 and n_blockers grows.
struct AdversarialInstance {
    StochasticGraph graph;
    std::vector<double> y;
    int target_edge = 0;
};

AdversarialInstance adversarial_family(int t, int n_blockers, double eps);

}  // namespace stochmatch
