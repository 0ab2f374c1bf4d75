#include "stochmatch/bounds.hpp"

#include <cmath>
#include <string>

#include "stochmatch/errors.hpp"

namespace stochmatch {

namespace {

// Poisson CDF Pr[T <= t-1] for T ~ Poisson(lambda): terms are accumulated in
// log space (log term_k = -lambda + k log lambda - lgamma(k+1)) with Kahan
// compensation, which stays stable for any lambda.
double poisson_cdf_terms(int t, double lambda) {
    if (lambda <= 0.0) return 1.0;
    const double log_lambda = std::log(lambda);
    double sum = 0.0, comp = 0.0;
    double log_term = -lambda;  // k = 0
    for (int k = 0; k <= t - 1; ++k) {
        if (k > 0) log_term += log_lambda - std::log(static_cast<double>(k));
        const double term = std::exp(log_term);
        const double yk = term - comp;
        const double tk = sum + yk;
        comp = (tk - sum) - yk;
        sum = tk;
    }
    return std::min(sum, 1.0);
}

double check_x(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw ValidationError("poisson_factor: x outside [0, 1]");
    }
    return x;
}

// Chernoff-Hoeffding surrogate for the patience factor of a finite t >=
// kChernoffPatience endpoint.  With eps = (1-x)/x the exponent equals
// (1-x)^2 (t-1) / (1+x), so the x -> 1 limit of the bracket is 0.
double chernoff_tail_factor(int t, double x) {
    const double eps = (1.0 - x) / x;
    if (eps < 1e-12) return 0.0;
    const double exponent = eps * eps * x * (t - 1) / (2.0 + eps);
    return 1.0 - std::exp(-exponent);
}

double endpoint_factor_chernoff(Patience t, double x) {
    if (t.is_infinite()) return 1.0;
    if (t.value() >= kChernoffPatience) return chernoff_tail_factor(t.value(), x);
    return poisson_factor(t, x);
}

}  // namespace

double poisson_factor(Patience t, double x) {
    check_x(x);
    if (t.is_infinite() || t.value() == 1) return 1.0;
    return poisson_cdf_terms(t.value(), x * (t.value() - 1));
}

double guarantee_factor(const BoundQuery& q, const QuadratureParams& params) {
    if (!(q.z >= 0.0 && q.z <= 1.0)) {
        throw ValidationError("guarantee_factor: z outside [0, 1]");
    }
    const double decay = 1.0 - q.z;
    auto integrand = [&](double x) {
        double val = 1.0;
        if (!q.u_isolated) val *= std::exp(-x * decay) * poisson_factor(q.t_u, x);
        if (!q.v_isolated) val *= std::exp(-x * decay) * poisson_factor(q.t_v, x);
        return val;
    };
    const double integral = integrate_checked(integrand, params, "guarantee_factor");
    return evaluate(q.atten, q.z) * integral;
}

double chernoff_factor(Patience t_u, Patience t_v, double z, const QuadratureParams& params) {
    if (!t_u.at_least(kChernoffPatience) && !t_v.at_least(kChernoffPatience)) {
        throw ValidationError("chernoff_factor: requires max(t_u, t_v) >= " +
                              std::to_string(kChernoffPatience));
    }
    if (!(z >= 0.0 && z <= 1.0)) {
        throw ValidationError("chernoff_factor: z outside [0, 1]");
    }
    const double decay = 1.0 - z;
    auto integrand = [&](double x) {
        return std::exp(-2.0 * x * decay) * endpoint_factor_chernoff(t_u, x) *
               endpoint_factor_chernoff(t_v, x);
    };
    return integrate_checked(integrand, params, "chernoff_factor");
}

WorstCase worst_case_search(const AttenuationSpec& spec, int t_max, int z_steps,
                            const QuadratureParams& params) {
    if (t_max < 1 || z_steps < 2) {
        throw ValidationError("worst_case_search: need t_max >= 1 and z_steps >= 2");
    }
    std::vector<Patience> patiences;
    for (int t = 1; t <= t_max; ++t) patiences.push_back(Patience::finite(t));
    patiences.push_back(Patience::infinite());
    const int nt = static_cast<int>(patiences.size());

    // Precompute the Poisson factors per (patience, node) for both rules so
    // each grid cell is an inner product; the coarse/fine pair doubles as the
    // quadrature self-check.
    const QuadratureRule& coarse = gauss_legendre(params.nodes);
    const QuadratureRule& fine = gauss_legendre(params.check_nodes);
    auto factor_table = [&](const QuadratureRule& rule) {
        std::vector<std::vector<double>> table(nt);
        for (int i = 0; i < nt; ++i) {
            table[i].resize(rule.nodes.size());
            for (size_t k = 0; k < rule.nodes.size(); ++k) {
                table[i][k] = poisson_factor(patiences[i], rule.nodes[k]);
            }
        }
        return table;
    };
    const auto g_coarse = factor_table(coarse);
    const auto g_fine = factor_table(fine);

    WorstCase best;
    bool first = true;
    std::vector<double> w_coarse(coarse.nodes.size());
    std::vector<double> w_fine(fine.nodes.size());
    for (int iz = 0; iz < z_steps; ++iz) {
        const double z = static_cast<double>(iz) / (z_steps - 1);
        const double a = evaluate(spec, z);
        for (size_t k = 0; k < coarse.nodes.size(); ++k) {
            w_coarse[k] = coarse.weights[k] * std::exp(-2.0 * coarse.nodes[k] * (1.0 - z));
        }
        for (size_t k = 0; k < fine.nodes.size(); ++k) {
            w_fine[k] = fine.weights[k] * std::exp(-2.0 * fine.nodes[k] * (1.0 - z));
        }
        for (int i = 0; i < nt; ++i) {
            for (int j = i; j < nt; ++j) {
                double sum_c = 0.0;
                for (size_t k = 0; k < coarse.nodes.size(); ++k) {
                    sum_c += w_coarse[k] * g_coarse[i][k] * g_coarse[j][k];
                }
                double sum_f = 0.0;
                for (size_t k = 0; k < fine.nodes.size(); ++k) {
                    sum_f += w_fine[k] * g_fine[i][k] * g_fine[j][k];
                }
                if (std::abs(sum_c - sum_f) > params.tolerance) {
                    throw NumericalError("worst_case_search: quadrature self-check failed at t_u=" +
                                         patiences[i].to_string() + " t_v=" +
                                         patiences[j].to_string() + " z=" + std::to_string(z));
                }
                const double value = a * sum_f;
                if (first || value < best.value) {
                    best = {value, patiences[i], patiences[j], z};
                    first = false;
                }
            }
        }
    }
    return best;
}

AdversarialInstance adversarial_family(int t, int n_blockers, double eps) {
    if (t < 1) throw ValidationError("adversarial_family: t must be >= 1");
    if (n_blockers < 1) throw ValidationError("adversarial_family: n_blockers must be >= 1");
    if (!(eps >= 0.0 && eps <= 1.0)) {
        throw ValidationError("adversarial_family: eps outside [0, 1]");
    }

    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::vector<double> y;
    vertices.push_back({"u", Patience::finite(t)});
    vertices.push_back({"v", Patience::finite(t)});
    edges.push_back({0, 1, 1.0, 1.0});  // target: z = 1 * eps
    y.push_back(eps);

    const double blocker_y = (1.0 - eps) / n_blockers;
    for (int side = 0; side < 2; ++side) {
        const std::string prefix = side == 0 ? "u" : "v";
        for (int i = 0; i < t - 1; ++i) {
            const int leaf = static_cast<int>(vertices.size());
            vertices.push_back({prefix + "t" + std::to_string(i), Patience::finite(1)});
            edges.push_back({side, leaf, 1.0, 0.0});  // timeout edge: burns patience only
            y.push_back(1.0);
        }
        for (int i = 0; i < n_blockers; ++i) {
            const int leaf = static_cast<int>(vertices.size());
            vertices.push_back({prefix + "b" + std::to_string(i), Patience::finite(1)});
            edges.push_back({side, leaf, 1.0, 1.0});  // blocker: matches when probed
            y.push_back(blocker_y);
        }
    }

    AdversarialInstance inst{StochasticGraph(std::move(vertices), std::move(edges)), std::move(y),
                             0};
    return inst;
}

}  // namespace stochmatch
