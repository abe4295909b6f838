#pragma once

#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "qpsr/model.hpp"

namespace qpsr {

/// Shift-rule constants for gates generated by sigma/2: the generator
/// eigenvalues are +-r with r = 1/2, and the shift is s = pi/(4r) = pi/2.
struct ShiftRuleConstants {
    double r = 0.5;
    double s = std::numbers::pi / (4.0 * 0.5);
};

struct GradientReport {
    std::vector<double> partials;
    std::uint64_t n_circuit_evals = 0;
};

/// d<B>/dtheta_i for a parameter that enters an angle additively:
/// r * [f(theta_i + s) - f(theta_i - s)].
double psr_partial_plain(const ReuploadingModel& model, double x, const Executor& exec,
                         std::size_t param_index, const EvalTag& tag_base = {});

/// d<B>/dtheta_i for a parameter that multiplies the feature. Shifts the
/// effective angle theta_i * x + ... by +-s and recombines as
/// r * [f+ - f-] * x. Algebraically identical to shifting theta_i by s/x for
/// x != 0, but regular at x = 0 (the chain-rule factor x makes the result an
/// exact 0 there, with no division anywhere).
double psr_partial_scaled(const ReuploadingModel& model, double x, const Executor& exec,
                          std::size_t param_index, const EvalTag& tag_base = {});

/// Full <B> gradient at one data point: 2p circuit evaluations.
GradientReport psr_gradient(const ReuploadingModel& model, double x, const Executor& exec,
                            const EvalTag& tag_base = {});

/// Central finite difference [f(theta_i + h) - f(theta_i - h)] / 2h on
/// exact-mode estimates. Independent derivative oracle for the shift rule.
double fd_partial(const ReuploadingModel& model, double x, std::size_t param_index, double h);

/// Gradient-correction study on the single-RX circuit with angle theta * x.
/// For each grid point, |d_analytic y^ - d_PSR y^| where y^ = (<B>_x - c)^2,
/// using the corrected (angle-level, times x) or uncorrected (parameter-level,
/// no x factor) rule. Exact mode throughout.
std::vector<double> figure1_discrepancy(double theta, std::span<const double> x_grid, double c,
                                        bool corrected);

}  // namespace qpsr
