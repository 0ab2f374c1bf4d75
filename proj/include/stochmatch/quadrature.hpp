#pragma once

#include <functional>
#include <span>
#include <vector>

namespace stochmatch {

struct QuadratureRule {
    std::vector<double> nodes;    // strictly inside (0, 1)
    std::vector<double> weights;  // sum to 1
};

// Gauss-Legendre rule with n points mapped to [0, 1].  Rules are computed by
// Newton iteration on the Legendre polynomial and cached per n.
const QuadratureRule& gauss_legendre(int n);

struct QuadratureParams {
    int nodes = 128;
    int check_nodes = 256;  // refinement used as an error check
    double tolerance = 1e-8;
};

// Integrates f over [0, 1] with params.nodes points and cross-checks against
// params.check_nodes points; throws NumericalError when the two disagree by
// more than params.tolerance.  Returns the finer estimate.
double integrate_checked(const std::function<double(double)>& f, const QuadratureParams& params,
                         const char* what);

}  // namespace stochmatch
