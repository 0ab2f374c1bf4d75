#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stochmatch/graph.hpp"

namespace stochmatch {

// Pipage-style dependent rounding on bipartite graphs: repeatedly find a
// cycle (else a maximal path) in the floating subgraph 0 < y_e < 1, 2-color
// its edges alternately, and shift mass along it.  With the shift
// probabilities beta/(alpha+beta) vs alpha/(alpha+beta) the rounded vector
// satisfies, for every vertex and b in {0, 1}:
//   * exact marginals       E[Y_e] = y_e
//   * degree preservation   sum_{e at v} Y_e in {floor(S_v), ceil(S_v)}
//   * negative correlation  Pr[AND_{e in S} Y_e = b] <= prod_{e in S} Pr[Y_e = b]
// for any S inside one vertex's edge set.

struct RoundedVector {
    std::vector<std::uint8_t> values;  // 0/1 per edge
    int iterations = 0;
};

// Deterministic given (g, y, seed); entries within 1e-12 of an integer are
// snapped before and between iterations.  Throws ValidationError("not
// bipartite") on odd cycles and rejects out-of-range y.
RoundedVector dependent_round(const StochasticGraph& g, std::span<const double> y,
                              std::uint64_t seed);

// True when every vertex's rounded degree lies in the floor/ceil window of
// its fractional degree.
bool degree_rounding_ok(const StochasticGraph& g, std::span<const double> y,
                        const RoundedVector& rounded);

struct NegativeCorrelationReport {
    std::uint64_t reps = 0;
    int checks = 0;
    int violations = 0;
    // Smallest value of (product + 4*CI - empirical) across all checks;
    // negative means a violation.
    double worst_margin = 0.0;
    int worst_vertex = -1;
    std::vector<int> worst_subset;
    int worst_b = 0;
    bool all_ok() const { return violations == 0; }
};

// Empirically verifies negative correlation over `reps` independent rounding
// passes: for every vertex, every subset S of its incident edges with
// |S| <= 4, and b in {0, 1}, the empirical joint frequency must not exceed
// the product of exact marginals by more than 4 standard errors.
NegativeCorrelationReport verify_negative_correlation(const StochasticGraph& g,
                                                      std::span<const double> y,
                                                      std::uint64_t reps, std::uint64_t seed);

}  // namespace stochmatch
