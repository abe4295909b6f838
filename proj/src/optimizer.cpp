#include "qpsr/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace qpsr {

namespace {

void require_nonempty(const Dataset& data) {
    if (data.xs.empty() || data.xs.size() != data.ys.size()) {
        throw std::invalid_argument("dataset must be nonempty with equal-length xs and ys");
    }
}

}  // namespace

double mse_loss(const ReuploadingModel& model, const Dataset& data, const Executor& exec,
                const EvalTag& tag_base, LossNorm norm) {
    require_nonempty(data);
    double acc = 0.0;
    for (std::size_t j = 0; j < data.size(); ++j) {
        // tag_base.param_index is preserved: train_cmaes keys offspring
        // evaluations through it so each candidate gets its own streams.
        EvalTag tag = tag_base;
        tag.data_index = j;
        tag.shift = static_cast<std::uint64_t>(ShiftTag::Loss);
        const double b = estimate(model, data.xs[j], exec, tag);
        const double r = b - data.ys[j];
        acc += r * r;
    }
    return norm == LossNorm::Mean ? acc / static_cast<double>(data.size()) : acc;
}

GradientReport mse_gradient(const ReuploadingModel& model, const Dataset& data, const Executor& exec,
                            const EvalTag& tag_base, LossNorm norm) {
    require_nonempty(data);
    const std::size_t p = model.n_params();
    const std::size_t n = data.size();

    GradientReport report;
    report.partials.assign(p, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        EvalTag tag = tag_base;
        tag.data_index = j;
        tag.param_index = 0;
        tag.shift = static_cast<std::uint64_t>(ShiftTag::GradBase);
        const double b = estimate(model, data.xs[j], exec, tag);

        EvalTag grad_tag = tag_base;
        grad_tag.data_index = j;
        const GradientReport point = psr_gradient(model, data.xs[j], exec, grad_tag);

        const double factor = 2.0 * (b - data.ys[j]);
        for (std::size_t i = 0; i < p; ++i) {
            report.partials[i] += factor * point.partials[i];
        }
        report.n_circuit_evals += point.n_circuit_evals + 1;
    }
    if (norm == LossNorm::Mean) {
        for (double& g : report.partials) {
            g /= static_cast<double>(n);
        }
    }
    return report;
}

AdamState AdamState::init(std::size_t n_params, double eta, double beta1, double beta2,
                          double epsilon) {
    AdamState s;
    s.m.assign(n_params, 0.0);
    s.v.assign(n_params, 0.0);
    s.t = 0;
    s.eta = eta;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.epsilon = epsilon;
    return s;
}

std::pair<AdamState, std::vector<double>> adam_step(const AdamState& state,
                                                    std::span<const double> theta,
                                                    std::span<const double> grad) {
    const std::size_t p = theta.size();
    if (grad.size() != p || state.m.size() != p || state.v.size() != p) {
        throw std::invalid_argument("adam_step: vector length mismatch");
    }
    AdamState next = state;
    next.t = state.t + 1;
    std::vector<double> updated(theta.begin(), theta.end());

    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(next.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(next.t));
    for (std::size_t i = 0; i < p; ++i) {
        next.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
        next.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
        const double m_hat = next.m[i] / bc1;
        const double v_hat = next.v[i] / bc2;
        updated[i] -= state.eta * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
    return {std::move(next), std::move(updated)};
}

TrainReport train_adam(const ReuploadingModel& model, const Dataset& data, const Executor& exec,
                       const TrainConfig& cfg) {
    if (cfg.max_epochs < 1) {
        throw std::invalid_argument("n_epochs must be >= 1");
    }
    if (cfg.eta <= 0.0) {
        throw std::invalid_argument("eta must be > 0");
    }
    require_nonempty(data);

    const std::uint64_t evals_before = exec.eval_count();
    std::vector<double> theta = model.params();

    TrainReport report;
    report.initial_loss = mse_loss(model, data, exec, EvalTag{0, 0, 0, 0}, cfg.loss_norm);
    report.best_loss = report.initial_loss;
    report.theta_best = theta;

    AdamState state = AdamState::init(theta.size(), cfg.eta, cfg.beta1, cfg.beta2, cfg.epsilon);
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        EvalTag tag;
        tag.epoch = static_cast<std::uint64_t>(epoch);

        const ReuploadingModel current = model.with_params(theta);
        const GradientReport grad = mse_gradient(current, data, exec, tag, cfg.loss_norm);
        auto [next_state, next_theta] = adam_step(state, theta, grad.partials);
        state = std::move(next_state);
        theta = std::move(next_theta);

        const double loss = mse_loss(model.with_params(theta), data, exec, tag, cfg.loss_norm);
        report.loss_history.push_back(loss);
        report.epochs_run = epoch;
        if (loss < report.best_loss) {
            report.best_loss = loss;
            report.theta_best = theta;
        }
        if (loss <= cfg.eps_j) {
            report.stop_reason = StopReason::Threshold;
            break;
        }
        report.stop_reason = StopReason::MaxEpochs;
    }
    report.total_circuit_evals = exec.eval_count() - evals_before;
    return report;
}

}  // namespace qpsr
