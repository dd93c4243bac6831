#pragma once

#include <functional>
#include <string>
#include <vector>

#include "aor/layers.hpp"

namespace aor {

struct GradCheckEntry {
    std::string name;
    double max_rel_err = 0.0;
    std::size_t worst_index = 0; // flat index into the parameter
    double analytic = 0.0;       // at the worst entry
    double numeric = 0.0;
    bool passed = true;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double max_rel_err = 0.0;
    bool all_passed = true;
};

/// Compares each parameter's current grad against central finite differences
/// of `objective`. The objective must be a deterministic function of the
/// parameter values and must not touch gradients; the caller runs backward
/// once beforehand to populate the analytic grads. Relative error uses the
/// denominator max(1, |analytic|, |numeric|). Requires h in [1e-8, 1e-4];
/// throws NumericalError when the objective returns a non-finite value.
GradCheckReport grad_check(const std::function<double()>& objective,
                           const std::vector<Parameter*>& params, double h, double tol);

/// Central finite difference of a scalar function at x.
double central_difference(const std::function<double(double)>& f, double x, double h);

} // namespace aor
