#include "qpsr/gradient.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace qpsr {

namespace {

void require_single_occurrence(const ReuploadingModel& model, std::size_t param_index) {
    if (param_index >= model.n_params()) {
        throw std::invalid_argument("psr_partial: parameter index out of range");
    }
    int occurrences = 0;
    for (const auto& gate : model.gate_specs()) {
        if (gate.angle.references(param_index)) {
            ++occurrences;
        }
    }
    if (occurrences != 1) {
        throw std::invalid_argument("psr_partial: parameter must appear in exactly one gate");
    }
}

EvalTag shifted_tag(const EvalTag& base, std::size_t param_index, ShiftTag shift) {
    EvalTag tag = base;
    tag.param_index = static_cast<std::uint64_t>(param_index);
    tag.shift = static_cast<std::uint64_t>(shift);
    return tag;
}

}  // namespace

double psr_partial_plain(const ReuploadingModel& model, double x, const Executor& exec,
                         std::size_t param_index, const EvalTag& tag_base) {
    require_single_occurrence(model, param_index);
    if (model.is_scale_param(param_index)) {
        throw std::invalid_argument("psr_partial_plain: parameter multiplies the feature; use the scaled rule");
    }
    const ShiftRuleConstants k;
    const double theta_i = model.params()[param_index];
    const double f_plus = estimate(model.with_param(param_index, theta_i + k.s), x, exec,
                                   shifted_tag(tag_base, param_index, ShiftTag::Plus));
    const double f_minus = estimate(model.with_param(param_index, theta_i - k.s), x, exec,
                                    shifted_tag(tag_base, param_index, ShiftTag::Minus));
    return k.r * (f_plus - f_minus);
}

double psr_partial_scaled(const ReuploadingModel& model, double x, const Executor& exec,
                          std::size_t param_index, const EvalTag& tag_base) {
    require_single_occurrence(model, param_index);
    if (!model.is_scale_param(param_index)) {
        throw std::invalid_argument("psr_partial_scaled: parameter does not multiply the feature");
    }
    const ShiftRuleConstants k;
    const double f_plus = estimate(model, x, exec, shifted_tag(tag_base, param_index, ShiftTag::Plus),
                                   AngleShift{param_index, +k.s});
    const double f_minus = estimate(model, x, exec, shifted_tag(tag_base, param_index, ShiftTag::Minus),
                                    AngleShift{param_index, -k.s});
    return k.r * (f_plus - f_minus) * x;
}

GradientReport psr_gradient(const ReuploadingModel& model, double x, const Executor& exec,
                            const EvalTag& tag_base) {
    const std::size_t p = model.n_params();
    GradientReport report;
    report.partials.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
        report.partials[i] = model.is_scale_param(i)
                                 ? psr_partial_scaled(model, x, exec, i, tag_base)
                                 : psr_partial_plain(model, x, exec, i, tag_base);
    }
    report.n_circuit_evals = 2 * static_cast<std::uint64_t>(p);
    return report;
}

double fd_partial(const ReuploadingModel& model, double x, std::size_t param_index, double h) {
    if (h <= 0.0) {
        throw std::invalid_argument("fd_partial: step h must be > 0");
    }
    if (param_index >= model.n_params()) {
        throw std::invalid_argument("fd_partial: parameter index out of range");
    }
    const Executor exec = Executor::exact();
    const double theta_i = model.params()[param_index];
    const double f_plus = estimate(model.with_param(param_index, theta_i + h), x, exec);
    const double f_minus = estimate(model.with_param(param_index, theta_i - h), x, exec);
    return (f_plus - f_minus) / (2.0 * h);
}

std::vector<double> figure1_discrepancy(double theta, std::span<const double> x_grid, double c,
                                        bool corrected) {
    const auto model = ReuploadingModel::single_rx(theta);
    const Executor exec = Executor::exact();
    const ShiftRuleConstants k;

    std::vector<double> out;
    out.reserve(x_grid.size());
    for (const double x : x_grid) {
        const double b = estimate(model, x, exec);  // = cos(theta * x)
        const double d_analytic = 2.0 * (std::cos(theta * x) - c) * (-std::sin(theta * x)) * x;

        double db;
        if (corrected) {
            db = psr_partial_scaled(model, x, exec, 0);
        } else {
            // First-version rule: shift theta itself, no chain-rule factor.
            const double f_plus = estimate(model.with_param(0, theta + k.s), x, exec);
            const double f_minus = estimate(model.with_param(0, theta - k.s), x, exec);
            db = k.r * (f_plus - f_minus);
        }
        const double d_psr = 2.0 * (b - c) * db;
        out.push_back(std::abs(d_analytic - d_psr));
    }
    return out;
}

}  // namespace qpsr
