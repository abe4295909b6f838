#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qpsr/cmaes.hpp"
#include "qpsr/model.hpp"
#include "qpsr/optimizer.hpp"

namespace qpsr {

/// Per-grid-point statistics of repeated shot-based predictions.
struct PredictionStats {
    std::vector<double> grid;
    std::vector<double> mean;
    std::vector<double> stddev;  // sample std over repetitions (0 when n_reps < 2)
    int n_reps = 0;
};

/// Predictions presented relative to the target law: (value + k) / (law + k).
/// The offset keeps the ratio finite where the law crosses zero.
struct NormalizedView {
    double k_offset = 10.0;
    std::vector<double> normalized_mean;
    std::vector<double> normalized_low;
    std::vector<double> normalized_high;
};

/// n equally spaced points on [-1, 1], endpoints included (n = 1 centers at
/// 0); targets y = sin(2x).
Dataset make_dataset(int n_data);

std::vector<double> linspace(double lo, double hi, int n);

/// Target law of the regression experiment.
double target_law(double x);

/// Runs n_reps shot-based predictions at every grid point; tags are
/// (repetition, grid index) so the protocol is schedule-independent.
PredictionStats predict_stats(const ReuploadingModel& model, const Executor& exec,
                              std::span<const double> grid, int n_reps);

/// Exact-mode predictions on the grid (the "simulated theoretical" curve).
std::vector<double> exact_curve(const ReuploadingModel& model, std::span<const double> grid);

NormalizedView make_normalized_view(std::span<const double> mean, std::span<const double> stddev,
                                    std::span<const double> law, double k = 10.0);

/// Fraction of grid points where |exact - mean| <= stddev.
double band_coverage(const PredictionStats& stats, std::span<const double> exact);

enum class OptimizerKind { PsrAdam, Cmaes };

struct ExperimentConfig {
    int n_layers = 3;
    int n_data = 25;
    std::int64_t n_shots = 1024;
    ExecMode train_mode = ExecMode::Shots;
    TrainConfig train;
    std::uint64_t master_seed = 12345;
    int n_grid = 100;
    int n_reps = 100;
};

struct ExperimentResult {
    std::vector<double> theta0;
    TrainReport train;
    PredictionStats stats;
    std::vector<double> exact_theoretical;
    NormalizedView view;
    Dataset dataset;
};

/// Draw theta0, train with the chosen optimizer, then run the prediction
/// protocol with theta_best (shot-based statistics plus the exact curve).
ExperimentResult run_regression_experiment(const ExperimentConfig& cfg, OptimizerKind optimizer);

struct Figure1Row {
    int theta_id = 0;
    double theta = 0.0;
    double x = 0.0;
    double discrepancy_corrected = 0.0;
    double discrepancy_uncorrected = 0.0;
};

/// Gradient-correction study: n_thetas random rotations, corrected and
/// uncorrected shift-rule discrepancies against the analytic derivative.
std::vector<Figure1Row> run_figure1_experiment(int n_thetas, std::span<const double> x_grid,
                                               std::uint64_t master_seed);

}  // namespace qpsr
