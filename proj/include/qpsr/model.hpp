#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "qpsr/rng.hpp"
#include "qpsr/simulator.hpp"

namespace qpsr {

/// Affine angle expression: theta[scale] * x + theta[offset], where either
/// parameter index may be absent and the feature term only applies when
/// uses_feature is set.
struct AngleSpec {
    std::optional<std::size_t> scale_param;
    std::optional<std::size_t> offset_param;
    bool uses_feature = false;

    double resolve(std::span<const double> params, double x) const;
    bool references(std::size_t param_index) const;
};

struct GateSpec {
    Axis axis = Axis::Y;
    AngleSpec angle;
};

/// Data re-uploading ansatz on one qubit. The standard layout has L layers,
/// each RY(theta_{k,1} * x + theta_{k,2}) followed by RZ(theta_{k,3}), so
/// p = 3L parameters. Immutable once constructed; use with_params to rebind.
class ReuploadingModel {
  public:
    ReuploadingModel(int n_layers, std::vector<double> params);

    /// One RX(theta * x) gate; the circuit of the gradient-correction study.
    static ReuploadingModel single_rx(double theta);

    int n_layers() const { return n_layers_; }
    std::size_t n_params() const { return params_.size(); }
    const std::vector<double>& params() const { return params_; }
    const std::vector<GateSpec>& gate_specs() const { return gates_; }

    ReuploadingModel with_params(std::vector<double> params) const;
    ReuploadingModel with_param(std::size_t index, double value) const;

    /// True when theta[index] multiplies the feature in some gate.
    bool is_scale_param(std::size_t index) const;

  private:
    ReuploadingModel() = default;

    int n_layers_ = 0;  // 0 marks a custom (non-layered) circuit
    std::vector<double> params_;
    std::vector<GateSpec> gates_;
};

/// Additive shift applied to the resolved angle of the gate(s) referencing
/// param_index. The corrected shift rule shifts the effective angle, which
/// stays regular at x = 0 where the literal s/x parameter shift does not.
struct AngleShift {
    std::size_t param_index = 0;
    double delta = 0.0;
};

std::vector<RotationGate> build_circuit(const ReuploadingModel& model, double x,
                                        std::optional<AngleShift> shift = std::nullopt);

enum class ExecMode { Exact, Shots };

struct ExecutorConfig {
    ExecMode mode = ExecMode::Exact;
    std::int64_t n_shots = 1024;
    std::uint64_t master_seed = 0;
};

/// Turns (model, x) into an estimate of <B>. Exact mode reads the statevector
/// probabilities; Shots mode samples a measurement batch on the stream derived
/// from (master_seed, eval_tag). Copies share one evaluation counter.
class Executor {
  public:
    explicit Executor(ExecutorConfig cfg);

    static Executor exact();
    static Executor shots(std::int64_t n_shots, std::uint64_t master_seed);

    const ExecutorConfig& config() const { return cfg_; }
    std::uint64_t eval_count() const { return evals_->load(); }
    void reset_eval_count() { evals_->store(0); }
    void count_one() const { evals_->fetch_add(1); }

  private:
    ExecutorConfig cfg_;
    std::shared_ptr<std::atomic<std::uint64_t>> evals_;
};

/// One circuit execution: prepare |0>, apply the gates, estimate <B>.
double estimate(const ReuploadingModel& model, double x, const Executor& exec,
                const EvalTag& tag = {}, std::optional<AngleShift> shift = std::nullopt);

}  // namespace qpsr
