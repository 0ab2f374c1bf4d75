#pragma once

#include <span>
#include <string>
#include <vector>

namespace stochmatch {

// Attenuation maps an edge's fractional mass z = p*y to an extra acceptance
// probability a~(z), biasing the probing process against heavy edges:
//
//   exponential   a~(z) = exp(-alpha * z),          alpha >= 1/2
//   linear        a~(z) = 1 - alpha * z,            alpha in [1/2, 1]
//   balanced      a~(z) = (1-z)(1-1/e)/(1-e^{-(1-z)})   (no parameter)
//   none          a~(z) = 1
//
// An attenuation function is called *effective* when a~(0) = 1 and
// z -> ln(1 - x z a~(z)) is convex on [0, 1] for every x in (0, 1);
// check_effective probes both conditions numerically.

enum class AttenuationFamily { exponential, linear, balanced, none };

struct AttenuationSpec {
    AttenuationFamily family = AttenuationFamily::none;
    double alpha = 0.5;  // ignored for balanced / none

    static AttenuationSpec exponential(double alpha = 0.5);
    static AttenuationSpec linear(double alpha = 0.5);
    static AttenuationSpec balanced();
    static AttenuationSpec none();

    std::string to_string() const;
};

// Parses CLI names: "exp", "lin", "balanced", "none".
AttenuationSpec make_attenuation(const std::string& family, double alpha);

// a~(z) for z in [0, 1]; the balanced family's removable singularity at z = 1
// is evaluated by series expansion.  Always returns a value in [0, 1].
double evaluate(const AttenuationSpec& spec, double z);

struct EffectivenessReport {
    bool condition2_ok = false;  // a~(0) == 1 within 1e-12
    bool condition3_ok = false;  // no centered second difference below -1e-7
    double worst_second_difference = 0.0;  // min over the grid, scaled by 1/h^2
    double worst_x = 0.0;
    double worst_z = 0.0;
    bool effective() const { return condition2_ok && condition3_ok; }
};

// Evaluates ln(1 - x z a~(z)) on a uniform z grid over [0, 1 - 1e-6] with
// z_steps points for every x in x_grid, and flags any centered second
// difference whose h^2-scaled value drops below -1e-7.
EffectivenessReport check_effective(const AttenuationSpec& spec, int z_steps,
                                    std::span<const double> x_grid);

// {0.01, 0.02, ..., 0.99}.
std::vector<double> default_x_grid();

}  // namespace stochmatch
