#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qpsr/gradient.hpp"
#include "qpsr/model.hpp"

namespace qpsr {

struct Dataset {
    std::vector<double> xs;
    std::vector<double> ys;

    std::size_t size() const { return xs.size(); }
};

/// J is the mean over data points by default; Sum keeps the raw accumulation.
enum class LossNorm { Mean, Sum };

/// J = (1/N) sum_j (<B>_{theta,x_j} - y_j)^2. Consumes exactly N estimates.
double mse_loss(const ReuploadingModel& model, const Dataset& data, const Executor& exec,
                const EvalTag& tag_base = {}, LossNorm norm = LossNorm::Mean);

/// dJ/dtheta_i = (1/N) sum_j 2 (<B>_j - y_j) * d<B>_j/dtheta_i, with the
/// partials from the shift rule. Per data point this costs one base estimate
/// plus 2p shifted ones, so (2p+1)*N circuit evaluations in total.
GradientReport mse_gradient(const ReuploadingModel& model, const Dataset& data, const Executor& exec,
                            const EvalTag& tag_base = {}, LossNorm norm = LossNorm::Mean);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t t = 0;
    double eta = 0.1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState init(std::size_t n_params, double eta, double beta1 = 0.9,
                          double beta2 = 0.999, double epsilon = 1e-8);
};

/// One Adam update. Returns the advanced state and the new parameter vector;
/// inputs are left untouched.
std::pair<AdamState, std::vector<double>> adam_step(const AdamState& state,
                                                    std::span<const double> theta,
                                                    std::span<const double> grad);

enum class StopReason { Threshold, MaxEpochs };

struct TrainConfig {
    double eta = 0.1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int max_epochs = 100;   // Adam epochs, or CMA-ES generations
    double eps_j = 5e-3;    // early-stop loss threshold
    LossNorm loss_norm = LossNorm::Mean;
    double cma_sigma0 = 0.5;
    std::optional<int> cma_lambda = std::nullopt;  // default 4 + floor(3 ln p)
};

struct TrainReport {
    std::vector<double> loss_history;  // one J per epoch
    std::vector<double> theta_best;    // parameters with the lowest recorded J
    int epochs_run = 0;
    std::uint64_t total_circuit_evals = 0;
    StopReason stop_reason = StopReason::MaxEpochs;
    double initial_loss = 0.0;
    double best_loss = 0.0;
};

/// Full-batch gradient descent: one mse_gradient + Adam step per epoch, then
/// one mse_loss for the logged J. Stops once J <= eps_j or at the epoch limit.
TrainReport train_adam(const ReuploadingModel& model, const Dataset& data, const Executor& exec,
                       const TrainConfig& cfg);

}  // namespace qpsr
