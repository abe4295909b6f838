#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "qpsr/optimizer.hpp"

namespace qpsr {

/// CMA-ES distribution state after one generation. covariance is row-major
/// p x p and stays symmetric positive-definite across accepted runs.
struct CmaState {
    std::vector<double> mean;
    double sigma = 0.0;
    std::vector<double> covariance;
    std::vector<double> path_sigma;
    std::vector<double> path_c;
    int lambda = 0;
    int generation = 0;
};

/// Objective called once per offspring; generation and member index identify
/// the evaluation for reproducible stochastic objectives.
using CmaesObjective = std::function<double(std::span<const double>, int generation, int member)>;

struct CmaesOptions {
    double sigma0 = 0.5;
    int max_generations = 500;
    double target_fitness = -std::numeric_limits<double>::infinity();
    std::optional<int> lambda = std::nullopt;  // default 4 + floor(3 ln p)
    std::uint64_t seed = 0;
    std::function<void(const CmaState&)> on_generation = nullptr;
};

struct CmaesResult {
    std::vector<double> best_x;
    double best_fitness = std::numeric_limits<double>::infinity();
    std::vector<double> fitness_history;  // best offspring fitness per generation
    int generations = 0;
    std::uint64_t n_evaluations = 0;  // objective calls
    bool reached_target = false;
};

/// Standard (mu/mu_w, lambda)-CMA-ES with cumulative step-size adaptation and
/// rank-one plus rank-mu covariance updates, default weights and learning
/// rates. Minimizes the objective as a black box.
CmaesResult cmaes_minimize(const CmaesObjective& objective, std::span<const double> initial_mean,
                           const CmaesOptions& options);

/// CMA-ES on the circuit MSE loss, reported in the same shape as train_adam.
/// Each fitness evaluation costs N_data circuit estimations.
TrainReport train_cmaes(const ReuploadingModel& model, const Dataset& data, const Executor& exec,
                        const TrainConfig& cfg);

}  // namespace qpsr
