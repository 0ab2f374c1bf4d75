#include "stochmatch/attenuation.hpp"

#include <cmath>
#include <numbers>

#include "stochmatch/errors.hpp"

namespace stochmatch {

namespace {

constexpr double kOneMinusInvE = 1.0 - 1.0 / std::numbers::e;

void validate_alpha(AttenuationFamily family, double alpha) {
    if (family == AttenuationFamily::exponential && !(alpha >= 0.5)) {
        throw ValidationError("exponential attenuation requires alpha >= 1/2, got " +
                              std::to_string(alpha));
    }
    if (family == AttenuationFamily::linear && !(alpha >= 0.5 && alpha <= 1.0)) {
        throw ValidationError("linear attenuation requires alpha in [1/2, 1], got " +
                              std::to_string(alpha));
    }
}

}  // namespace

AttenuationSpec AttenuationSpec::exponential(double alpha) {
    validate_alpha(AttenuationFamily::exponential, alpha);
    return {AttenuationFamily::exponential, alpha};
}

AttenuationSpec AttenuationSpec::linear(double alpha) {
    validate_alpha(AttenuationFamily::linear, alpha);
    return {AttenuationFamily::linear, alpha};
}

AttenuationSpec AttenuationSpec::balanced() { return {AttenuationFamily::balanced, 0.0}; }

AttenuationSpec AttenuationSpec::none() { return {AttenuationFamily::none, 0.0}; }

std::string AttenuationSpec::to_string() const {
    switch (family) {
        case AttenuationFamily::exponential:
            return "exp(alpha=" + std::to_string(alpha) + ")";
        case AttenuationFamily::linear:
            return "lin(alpha=" + std::to_string(alpha) + ")";
        case AttenuationFamily::balanced:
            return "balanced";
        case AttenuationFamily::none:
            return "none";
    }
    return "?";
}

AttenuationSpec make_attenuation(const std::string& family, double alpha) {
    if (family == "exp") return AttenuationSpec::exponential(alpha);
    if (family == "lin") return AttenuationSpec::linear(alpha);
    if (family == "balanced") return AttenuationSpec::balanced();
    if (family == "none") return AttenuationSpec::none();
    throw ValidationError("unknown attenuation family '" + family +
                          "' (expected exp|lin|balanced|none)");
}

double evaluate(const AttenuationSpec& spec, double z) {
    if (!(z >= 0.0 && z <= 1.0)) {
        throw ValidationError("attenuation: z outside [0, 1]");
    }
    switch (spec.family) {
        case AttenuationFamily::exponential:
            return std::exp(-spec.alpha * z);
        case AttenuationFamily::linear:
            return 1.0 - spec.alpha * z;
        case AttenuationFamily::balanced: {
            const double s = 1.0 - z;
            if (s < 1e-6) {
                // s/(1 - e^{-s}) = 1 + s/2 + s^2/12 + O(s^4)
                return kOneMinusInvE * (1.0 + 0.5 * s + s * s / 12.0);
            }
            return kOneMinusInvE * s / (1.0 - std::exp(-s));
        }
        case AttenuationFamily::none:
            return 1.0;
    }
    throw ValidationError("attenuation: unreachable family");
}

EffectivenessReport check_effective(const AttenuationSpec& spec, int z_steps,
                                    std::span<const double> x_grid) {
    if (z_steps < 3) {
        throw ValidationError("check_effective: z_steps must be at least 3");
    }
    for (double x : x_grid) {
        if (!(x > 0.0 && x < 1.0)) {
            throw ValidationError("check_effective: x grid values must lie strictly in (0, 1)");
        }
    }

    EffectivenessReport report;
    report.condition2_ok = std::abs(evaluate(spec, 0.0) - 1.0) <= 1e-12;

    // The grid stops at 1 - 1e-6: families with a~(1) > 0 are smooth through
    // z = 1, and for linear alpha = 1 the log argument degenerates exactly at
    // the endpoint.
    const double z_hi = 1.0 - 1e-6;
    const double h = z_hi / (z_steps - 1);
    std::vector<double> phi(z_steps);
    bool first = true;
    for (double x : x_grid) {
        for (int i = 0; i < z_steps; ++i) {
            const double z = i * h;
            const double arg = 1.0 - x * z * evaluate(spec, z);
            phi[i] = std::log(arg);
        }
        for (int i = 1; i + 1 < z_steps; ++i) {
            const double d2 = (phi[i - 1] - 2.0 * phi[i] + phi[i + 1]) / (h * h);
            if (first || d2 < report.worst_second_difference) {
                report.worst_second_difference = d2;
                report.worst_x = x;
                report.worst_z = i * h;
                first = false;
            }
        }
    }
    report.condition3_ok = !first && report.worst_second_difference >= -1e-7;
    return report;
}

std::vector<double> default_x_grid() {
    std::vector<double> grid;
    grid.reserve(99);
    for (int i = 1; i <= 99; ++i) grid.push_back(i / 100.0);
    return grid;
}

}  // namespace stochmatch
