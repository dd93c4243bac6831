#include "aor/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "aor/errors.hpp"

namespace aor {

double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

GradCheckReport grad_check(const std::function<double()>& objective,
                           const std::vector<Parameter*>& params, double h, double tol) {
    if (!(h >= 1e-8 && h <= 1e-4)) {
        throw ValidationError("grad_check: h must lie in [1e-8, 1e-4]");
    }
    GradCheckReport report;
    for (Parameter* param : params) {
        GradCheckEntry entry;
        entry.name = param->name;
        for (std::size_t i = 0; i < param->value.data.size(); ++i) {
            const double saved = param->value.data[i];
            param->value.data[i] = saved + h;
            const double f_plus = objective();
            param->value.data[i] = saved - h;
            const double f_minus = objective();
            param->value.data[i] = saved;
            if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
                throw NumericalError("grad_check: objective returned a non-finite value at " +
                                     param->name + "[" + std::to_string(i) + "]");
            }
            const double numeric = (f_plus - f_minus) / (2.0 * h);
            const double analytic = param->grad.data[i];
            const double rel =
                std::abs(analytic - numeric) /
                std::max({1.0, std::abs(analytic), std::abs(numeric)});
            if (rel > entry.max_rel_err) {
                entry.max_rel_err = rel;
                entry.worst_index = i;
                entry.analytic = analytic;
                entry.numeric = numeric;
            }
        }
        entry.passed = entry.max_rel_err <= tol;
        report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
        report.all_passed = report.all_passed && entry.passed;
        report.entries.push_back(std::move(entry));
    }
    return report;
}

} // namespace aor
