#include "stochmatch/lp.hpp"

#include <algorithm>
#include <cmath>

#include "stochmatch/errors.hpp"
#include "stochmatch/oracle.hpp"

namespace stochmatch {

namespace {

constexpr double kPivotTol = 1e-9;

// Dense tableau for: maximize c.x  s.t.  A.x <= b, x >= 0, with b >= 0.
// The all-slack basis is feasible, so the solve is a single phase.  Bland's
// rule (smallest eligible entering index, smallest basic index on ratio ties)
// guarantees termination on degenerate instances; an iteration guard catches
// numerical runaways.
class Simplex {
public:
    Simplex(int rows, int cols) : m_(rows), n_(cols), width_(cols + rows + 1) {
        tab_.assign(static_cast<size_t>(m_ + 1) * width_, 0.0);
        basis_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            at(i, n_ + i) = 1.0;
            basis_[i] = n_ + i;
        }
    }

    double& at(int r, int c) { return tab_[static_cast<size_t>(r) * width_ + c]; }
    double& rhs(int r) { return at(r, width_ - 1); }
    void set_objective(int col, double c) { at(m_, col) = -c; }

    // Returns the iteration count; solution is read back via value_of().
    int solve() {
        const int max_iter = 50 * (m_ + n_ + m_);  // 50 * (rows + cols incl. slacks)
        int iter = 0;
        while (true) {
            int enter = -1;
            for (int j = 0; j < width_ - 1; ++j) {
                if (at(m_, j) < -kPivotTol) {
                    enter = j;
                    break;  // Bland: first improving column
                }
            }
            if (enter < 0) break;

            int leave = -1;
            double best_ratio = 0.0;
            for (int i = 0; i < m_; ++i) {
                const double a = at(i, enter);
                if (a <= kPivotTol) continue;
                const double ratio = rhs(i) / a;
                if (leave < 0 || ratio < best_ratio - kPivotTol ||
                    (ratio < best_ratio + kPivotTol && basis_[i] < basis_[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave < 0) {
                throw NumericalError("simplex: unbounded direction (malformed constraint set)");
            }
            pivot(leave, enter);
            if (++iter > max_iter) {
                throw NumericalError("simplex: iteration guard exceeded (" +
                                     std::to_string(max_iter) + ")");
            }
        }
        return iter;
    }

    double objective_value() { return rhs(m_); }

    double value_of(int col) {
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] == col) return rhs(i);
        }
        return 0.0;
    }

private:
    void pivot(int r, int c) {
        const double scale = at(r, c);
        for (int j = 0; j < width_; ++j) at(r, j) /= scale;
        at(r, c) = 1.0;
        for (int i = 0; i <= m_; ++i) {
            if (i == r) continue;
            const double factor = at(i, c);
            if (factor == 0.0) continue;
            for (int j = 0; j < width_; ++j) at(i, j) -= factor * at(r, j);
            at(i, c) = 0.0;
        }
        basis_[r] = c;
    }

    int m_, n_, width_;
    std::vector<double> tab_;
    std::vector<int> basis_;
};

}  // namespace

LpSolution solve_lp(const StochasticGraph& g) {
    const int ne = g.num_edges();
    // Count rows: matching per non-isolated vertex, patience per finite
    // non-isolated vertex, plus y_e <= 1 per edge.
    std::vector<int> matching_row(g.num_vertices(), -1);
    std::vector<int> patience_row(g.num_vertices(), -1);
    int rows = 0;
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (g.degree(v) == 0) continue;
        matching_row[v] = rows++;
        if (!g.vertex(v).patience.is_infinite()) {
            patience_row[v] = rows++;
        }
    }
    const int first_bound_row = rows;
    rows += ne;

    Simplex sx(rows, ne);
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (matching_row[v] >= 0) {
            for (int e : g.incident(v)) sx.at(matching_row[v], e) = g.edge(e).prob;
            sx.rhs(matching_row[v]) = 1.0;
        }
        if (patience_row[v] >= 0) {
            for (int e : g.incident(v)) sx.at(patience_row[v], e) = 1.0;
            sx.rhs(patience_row[v]) = static_cast<double>(g.vertex(v).patience.value());
        }
    }
    for (int e = 0; e < ne; ++e) {
        sx.at(first_bound_row + e, e) = 1.0;
        sx.rhs(first_bound_row + e) = 1.0;
        sx.set_objective(e, g.edge(e).weight * g.edge(e).prob);
    }

    LpSolution sol;
    sol.iterations = sx.solve();
    sol.y.resize(ne);
    sol.z.resize(ne);
    sol.objective = 0.0;
    for (int e = 0; e < ne; ++e) {
        sol.y[e] = std::clamp(sx.value_of(e), 0.0, 1.0);
        sol.z[e] = sol.y[e] * g.edge(e).prob;
        sol.objective += g.edge(e).weight * sol.z[e];
    }
    return sol;
}

std::string ConstraintViolation::describe(const StochasticGraph& g) const {
    switch (kind) {
        case Kind::edge_range:
            return "edge " + std::to_string(id) + ": y outside [0, 1] by " +
                   std::to_string(amount);
        case Kind::matching:
            return "vertex " + g.vertex(id).name + ": matching constraint exceeded by " +
                   std::to_string(amount);
        case Kind::patience:
            return "vertex " + g.vertex(id).name + ": patience constraint exceeded by " +
                   std::to_string(amount);
        case Kind::dimension:
            return "y dimension mismatch";
    }
    return "unknown violation";
}

FeasibilityReport check_feasibility(const StochasticGraph& g, std::span<const double> y,
                                    double tol) {
    FeasibilityReport report;
    if (static_cast<int>(y.size()) != g.num_edges()) {
        report.violations.push_back({ConstraintViolation::Kind::dimension, -1,
                                     static_cast<double>(y.size()) - g.num_edges()});
        return report;
    }
    for (int e = 0; e < g.num_edges(); ++e) {
        const double over = std::max(-y[e], y[e] - 1.0);
        if (over > tol) {
            report.violations.push_back({ConstraintViolation::Kind::edge_range, e, over});
        }
    }
    for (int v = 0; v < g.num_vertices(); ++v) {
        double z_sum = 0.0, y_sum = 0.0;
        for (int e : g.incident(v)) {
            z_sum += y[e] * g.edge(e).prob;
            y_sum += y[e];
        }
        if (z_sum > 1.0 + tol) {
            report.violations.push_back({ConstraintViolation::Kind::matching, v, z_sum - 1.0});
        }
        const Patience& t = g.vertex(v).patience;
        if (!t.is_infinite() && y_sum > t.value() + tol) {
            report.violations.push_back(
                {ConstraintViolation::Kind::patience, v, y_sum - t.value()});
        }
    }
    return report;
}

UpperBoundCheck lp_upper_bound_check(const StochasticGraph& g, double tol) {
    UpperBoundCheck check;
    check.lp_value = solve_lp(g).objective;
    check.opt_value = optimal_adaptive_value(g);
    check.holds = check.lp_value >= check.opt_value - tol;
    return check;
}

}  // namespace stochmatch
