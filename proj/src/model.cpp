#include "qpsr/model.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace qpsr {

double AngleSpec::resolve(std::span<const double> params, double x) const {
    double angle = 0.0;
    if (uses_feature && scale_param) {
        angle += params[*scale_param] * x;
    }
    if (offset_param) {
        angle += params[*offset_param];
    }
    return angle;
}

bool AngleSpec::references(std::size_t param_index) const {
    return (uses_feature && scale_param && *scale_param == param_index) ||
           (offset_param && *offset_param == param_index);
}

ReuploadingModel::ReuploadingModel(int n_layers, std::vector<double> params) {
    if (n_layers < 1) {
        throw std::invalid_argument("ReuploadingModel: n_layers must be >= 1");
    }
    if (params.size() != static_cast<std::size_t>(3 * n_layers)) {
        throw std::invalid_argument("ReuploadingModel: expected " + std::to_string(3 * n_layers) +
                                    " parameters, got " + std::to_string(params.size()));
    }
    n_layers_ = n_layers;
    params_ = std::move(params);
    gates_.reserve(static_cast<std::size_t>(2 * n_layers));
    for (int k = 0; k < n_layers; ++k) {
        const std::size_t base = static_cast<std::size_t>(3 * k);
        gates_.push_back(GateSpec{Axis::Y, AngleSpec{base, base + 1, true}});
        gates_.push_back(GateSpec{Axis::Z, AngleSpec{std::nullopt, base + 2, false}});
    }
}

ReuploadingModel ReuploadingModel::single_rx(double theta) {
    ReuploadingModel m;
    m.n_layers_ = 0;
    m.params_ = {theta};
    m.gates_ = {GateSpec{Axis::X, AngleSpec{std::size_t{0}, std::nullopt, true}}};
    return m;
}

ReuploadingModel ReuploadingModel::with_params(std::vector<double> params) const {
    if (params.size() != params_.size()) {
        throw std::invalid_argument("with_params: parameter count mismatch");
    }
    ReuploadingModel m = *this;
    m.params_ = std::move(params);
    return m;
}

ReuploadingModel ReuploadingModel::with_param(std::size_t index, double value) const {
    if (index >= params_.size()) {
        throw std::invalid_argument("with_param: parameter index out of range");
    }
    ReuploadingModel m = *this;
    m.params_[index] = value;
    return m;
}

bool ReuploadingModel::is_scale_param(std::size_t index) const {
    for (const auto& gate : gates_) {
        if (gate.angle.uses_feature && gate.angle.scale_param && *gate.angle.scale_param == index) {
            return true;
        }
    }
    return false;
}

std::vector<RotationGate> build_circuit(const ReuploadingModel& model, double x,
                                        std::optional<AngleShift> shift) {
    std::vector<RotationGate> gates;
    gates.reserve(model.gate_specs().size());
    for (const auto& spec : model.gate_specs()) {
        double angle = spec.angle.resolve(model.params(), x);
        if (shift && spec.angle.references(shift->param_index)) {
            angle += shift->delta;
        }
        gates.push_back(RotationGate{spec.axis, angle});
    }
    return gates;
}

Executor::Executor(ExecutorConfig cfg)
    : cfg_(cfg), evals_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
    if (cfg_.mode == ExecMode::Shots && cfg_.n_shots < 1) {
        throw std::invalid_argument("Executor: n_shots must be >= 1 in Shots mode");
    }
}

Executor Executor::exact() { return Executor(ExecutorConfig{ExecMode::Exact, 0, 0}); }

Executor Executor::shots(std::int64_t n_shots, std::uint64_t master_seed) {
    return Executor(ExecutorConfig{ExecMode::Shots, n_shots, master_seed});
}

double estimate(const ReuploadingModel& model, double x, const Executor& exec,
                const EvalTag& tag, std::optional<AngleShift> shift) {
    StateVector state;
    for (const auto& gate : build_circuit(model, x, shift)) {
        state = apply_rotation(state, gate);
    }
    exec.count_one();
    if (exec.config().mode == ExecMode::Exact) {
        return exact_expectation_z(state);
    }
    auto rng = make_engine(derive_stream_seed(exec.config().master_seed, tag));
    return estimate_b(sample_counts(state, exec.config().n_shots, rng));
}

}  // namespace qpsr
