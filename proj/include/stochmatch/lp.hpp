#pragma once

#include <span>
#include <string>
#include <vector>

#include "stochmatch/graph.hpp"

namespace stochmatch {

// The probing relaxation over fractional probe intensities y_e in [0, 1]:
//
//   maximize    sum_e w_e * p_e * y_e
//   subject to  sum_{e at v} p_e * y_e <= 1      for every vertex v
//               sum_{e at v} y_e       <= t_v    for every finite-patience v
//
// z_e denotes p_e * y_e throughout.

struct LpSolution {
    std::vector<double> y;
    std::vector<double> z;  // z_e = p_e * y_e
    double objective = 0.0;
    int iterations = 0;
};

struct ConstraintViolation {
    enum class Kind { edge_range, matching, patience, dimension };
    Kind kind = Kind::edge_range;
    int id = -1;        // edge id or vertex id, depending on kind
    double amount = 0;  // how far past the bound
    std::string describe(const StochasticGraph& g) const;
};

struct FeasibilityReport {
    std::vector<ConstraintViolation> violations;
    bool feasible() const { return violations.empty(); }
};

// Dense primal simplex with Bland's rule (the all-slack basis is feasible, so
// no phase 1).  Throws NumericalError if the iteration guard trips.
LpSolution solve_lp(const StochasticGraph& g);

// Lists every constraint violated by more than tol.
FeasibilityReport check_feasibility(const StochasticGraph& g, std::span<const double> y,
                                    double tol = 1e-9);

struct UpperBoundCheck {
    double lp_value = 0.0;
    double opt_value = 0.0;  // optimal adaptive probing value (brute force)
    bool holds = false;      // lp_value >= opt_value - tol
};

// Verifies that the relaxation dominates the optimal adaptive policy on
// brute-force-sized instances (|E| <= 10).
UpperBoundCheck lp_upper_bound_check(const StochasticGraph& g, double tol = 1e-7);

}  // namespace stochmatch
