#include "stochmatch/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "stochmatch/errors.hpp"

namespace stochmatch {

namespace {

// Legendre P_n and P_n' at x via the three-term recurrence.
struct LegendreEval {
    double p;
    double dp;
};

LegendreEval legendre(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

QuadratureRule build_rule(int n) {
    if (n < 2) {
        throw ValidationError("gauss_legendre: need at least 2 nodes");
    }
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Tricomi's initial guess, then Newton.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        LegendreEval ev{};
        for (int iter = 0; iter < 100; ++iter) {
            ev = legendre(n, x);
            const double dx = ev.p / ev.dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        ev = legendre(n, x);
        const double w = 2.0 / ((1.0 - x * x) * ev.dp * ev.dp);
        // Map from [-1, 1] to [0, 1]; reverse so nodes come out ascending.
        rule.nodes[n - 1 - i] = 0.5 * (x + 1.0);
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre(int n) {
    static std::mutex mutex;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, build_rule(n)).first;
    }
    return it->second;
}

double integrate_checked(const std::function<double(double)>& f, const QuadratureParams& params,
                         const char* what) {
    auto apply = [&](const QuadratureRule& rule) {
        double sum = 0.0;
        for (size_t i = 0; i < rule.nodes.size(); ++i) {
            sum += rule.weights[i] * f(rule.nodes[i]);
        }
        return sum;
    };
    const double coarse = apply(gauss_legendre(params.nodes));
    const double fine = apply(gauss_legendre(params.check_nodes));
    if (std::abs(coarse - fine) > params.tolerance) {
        throw NumericalError(std::string(what) + ": quadrature self-check failed (" +
                             std::to_string(params.nodes) + " vs " +
                             std::to_string(params.check_nodes) + " nodes differ by " +
                             std::to_string(std::abs(coarse - fine)) + ")");
    }
    return fine;
}

}  // namespace stochmatch
