#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stochmatch/attenuation.hpp"
#include "stochmatch/graph.hpp"

namespace stochmatch {

// Random-order probing with attenuation: every edge draws an arrival time
// x_e ~ U[0,1]; edges are visited in arrival order (ties by edge id) and edge
// e is probed iff it is safe (both endpoints unmatched with patience left),
// its inclusion bit Y_e ~ Bernoulli(y_e) is 1, and its attenuation bit
// A_e ~ Bernoulli(a~(z_e)) is 1.  A probe consumes one unit of patience at
// both endpoints regardless of the activation outcome.

enum class EdgeOutcome : std::uint8_t {
    not_reached_safe,  // endpoint matched or out of patience at the edge's turn
    skipped_y,         // safe, but Y_e = 0
    skipped_a,         // safe, Y_e = 1, but A_e = 0
    probed_inactive,
    probed_active,
};

struct ProbeTrace {
    std::vector<int> arrival_order;  // edge ids sorted by arrival time
    std::vector<std::uint8_t> y_bit;  // drawn lazily; 0 for edges never reached safe
    std::vector<std::uint8_t> a_bit;
    std::vector<EdgeOutcome> outcome;
    std::vector<int> matching;  // probed-active edge ids
    double matched_weight = 0.0;
};

// One probing pass.  The fractional vector is validated up front (tolerance
// 1e-7); deterministic given (seed).
ProbeTrace attenuate_match(const StochasticGraph& g, std::span<const double> y,
                           const AttenuationSpec& spec, std::uint64_t seed);

struct SimResult {
    std::uint64_t reps = 0;
    std::vector<std::uint64_t> probe_count;  // per edge
    std::vector<std::uint64_t> match_count;
    std::vector<double> probe_rate;
    std::vector<double> probe_ci;  // 99% normal-approximation half-width
    std::vector<double> match_rate;
    double mean_weight = 0.0;
    double weight_ci = 0.0;
};

// Monte Carlo aggregate over `reps` independent traces.  Replications are
// processed in fixed-size chunks whose partial sums are folded in chunk
// order, so results are identical for any worker count.
SimResult monte_carlo(const StochasticGraph& g, std::span<const double> y,
                      const AttenuationSpec& spec, std::uint64_t reps, std::uint64_t seed,
                      int jobs = 1);

// Exact per-edge probe probabilities: the expectation over the uniform
// arrival permutation, taken by dynamic programming over (remaining edges,
// matched set, residual patience) -- every |E|! order contributes through the
// uniform next-edge recursion.  Capped at |E| <= 8.
std::vector<double> exact_probe_probabilities(const StochasticGraph& g, std::span<const double> y,
                                              const AttenuationSpec& spec);

struct BaselineResult {
    std::uint64_t reps = 0;
    double selectability = 0.0;  // edge-0 match probability divided by z_0
    double ci = 0.0;
    double match_prob = 0.0;  // edge-0 match probability estimate
    double z0 = 0.0;
};

// The order-symmetric control experiment on the hard star (see
// GeneratorParams::Family::star): round the companion fractional solution
// (Y_0 = 1 always, exactly one uniformly chosen leaf edge i gets Y_i = 1),
// then probe the rounded edges in uniform random order, accepting actives.
// Edge 0's match probability is estimated as Pr[probed] * p_0, which is exact
// because its own activation is independent of the blocking event; at T
// blockers the true selectability is (T+2) / (2(T+1)) < 1 - 1/e.
BaselineResult star_counterexample_baseline(int T, std::uint64_t reps, std::uint64_t seed);

}  // namespace stochmatch
