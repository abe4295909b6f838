#include "qpsr/experiment.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "qpsr/gradient.hpp"

namespace qpsr {

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) {
        throw std::invalid_argument("linspace: n must be >= 1");
    }
    if (n == 1) {
        return {0.5 * (lo + hi)};
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = lo + step * i;
    }
    out.back() = hi;
    return out;
}

double target_law(double x) { return std::sin(2.0 * x); }

Dataset make_dataset(int n_data) {
    if (n_data < 1) {
        throw std::invalid_argument("make_dataset: n_data must be >= 1");
    }
    Dataset data;
    data.xs = linspace(-1.0, 1.0, n_data);
    data.ys.reserve(data.xs.size());
    for (const double x : data.xs) {
        data.ys.push_back(target_law(x));
    }
    return data;
}

PredictionStats predict_stats(const ReuploadingModel& model, const Executor& exec,
                              std::span<const double> grid, int n_reps) {
    if (n_reps < 1) {
        throw std::invalid_argument("predict_stats: n_reps must be >= 1");
    }
    PredictionStats stats;
    stats.grid.assign(grid.begin(), grid.end());
    stats.n_reps = n_reps;
    stats.mean.reserve(grid.size());
    stats.stddev.reserve(grid.size());

    std::vector<double> reps(static_cast<std::size_t>(n_reps));
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double sum = 0.0;
        for (int rep = 0; rep < n_reps; ++rep) {
            EvalTag tag;
            tag.epoch = static_cast<std::uint64_t>(rep);
            tag.data_index = static_cast<std::uint64_t>(g);
            reps[static_cast<std::size_t>(rep)] = estimate(model, grid[g], exec, tag);
            sum += reps[static_cast<std::size_t>(rep)];
        }
        const double mean = sum / n_reps;
        double sd = 0.0;
        if (n_reps > 1) {
            double ss = 0.0;
            for (const double b : reps) {
                ss += (b - mean) * (b - mean);
            }
            sd = std::sqrt(ss / (n_reps - 1));
        }
        stats.mean.push_back(mean);
        stats.stddev.push_back(sd);
    }
    return stats;
}

std::vector<double> exact_curve(const ReuploadingModel& model, std::span<const double> grid) {
    const Executor exec = Executor::exact();
    std::vector<double> out;
    out.reserve(grid.size());
    for (const double x : grid) {
        out.push_back(estimate(model, x, exec));
    }
    return out;
}

NormalizedView make_normalized_view(std::span<const double> mean, std::span<const double> stddev,
                                    std::span<const double> law, double k) {
    if (mean.size() != stddev.size() || mean.size() != law.size()) {
        throw std::invalid_argument("make_normalized_view: length mismatch");
    }
    NormalizedView view;
    view.k_offset = k;
    view.normalized_mean.reserve(mean.size());
    view.normalized_low.reserve(mean.size());
    view.normalized_high.reserve(mean.size());
    for (std::size_t i = 0; i < mean.size(); ++i) {
        const double denom = law[i] + k;
        view.normalized_mean.push_back((mean[i] + k) / denom);
        view.normalized_low.push_back((mean[i] - stddev[i] + k) / denom);
        view.normalized_high.push_back((mean[i] + stddev[i] + k) / denom);
    }
    return view;
}

double band_coverage(const PredictionStats& stats, std::span<const double> exact) {
    if (exact.size() != stats.grid.size()) {
        throw std::invalid_argument("band_coverage: length mismatch");
    }
    if (exact.empty()) {
        return 0.0;
    }
    std::size_t inside = 0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        if (std::abs(exact[i] - stats.mean[i]) <= stats.stddev[i]) {
            ++inside;
        }
    }
    return static_cast<double>(inside) / static_cast<double>(exact.size());
}

ExperimentResult run_regression_experiment(const ExperimentConfig& cfg, OptimizerKind optimizer) {
    if (cfg.n_layers < 1) {
        throw std::invalid_argument("n_layers must be >= 1");
    }
    ExperimentResult result;
    result.dataset = make_dataset(cfg.n_data);

    const std::size_t p = static_cast<std::size_t>(3 * cfg.n_layers);
    auto init_rng = make_engine(derive_substream(cfg.master_seed, StreamPurpose::ParamInit));
    std::uniform_real_distribution<double> uniform(-std::numbers::pi, std::numbers::pi);
    result.theta0.reserve(p);
    for (std::size_t i = 0; i < p; ++i) {
        result.theta0.push_back(uniform(init_rng));
    }
    const ReuploadingModel model(cfg.n_layers, result.theta0);

    const StreamPurpose train_purpose = optimizer == OptimizerKind::PsrAdam
                                            ? StreamPurpose::TrainAdam
                                            : StreamPurpose::TrainCmaes;
    const std::uint64_t train_seed = derive_substream(cfg.master_seed, train_purpose);
    const Executor train_exec = cfg.train_mode == ExecMode::Shots
                                    ? Executor::shots(cfg.n_shots, train_seed)
                                    : Executor::exact();
    result.train = optimizer == OptimizerKind::PsrAdam
                       ? train_adam(model, result.dataset, train_exec, cfg.train)
                       : train_cmaes(model, result.dataset, train_exec, cfg.train);

    const ReuploadingModel best = model.with_params(result.train.theta_best);
    const Executor pred_exec =
        Executor::shots(cfg.n_shots, derive_substream(cfg.master_seed, StreamPurpose::Predict));
    const std::vector<double> grid = linspace(-1.0, 1.0, cfg.n_grid);
    result.stats = predict_stats(best, pred_exec, grid, cfg.n_reps);
    result.exact_theoretical = exact_curve(best, grid);

    std::vector<double> law;
    law.reserve(grid.size());
    for (const double x : grid) {
        law.push_back(target_law(x));
    }
    result.view = make_normalized_view(result.stats.mean, result.stats.stddev, law, 10.0);
    return result;
}

std::vector<Figure1Row> run_figure1_experiment(int n_thetas, std::span<const double> x_grid,
                                               std::uint64_t master_seed) {
    if (n_thetas < 1) {
        throw std::invalid_argument("run_figure1_experiment: n_thetas must be >= 1");
    }
    auto rng = make_engine(derive_substream(master_seed, StreamPurpose::Figure1));
    std::uniform_real_distribution<double> uniform(-std::numbers::pi, std::numbers::pi);

    std::vector<Figure1Row> rows;
    rows.reserve(static_cast<std::size_t>(n_thetas) * x_grid.size());
    for (int t = 0; t < n_thetas; ++t) {
        const double theta = uniform(rng);
        const std::vector<double> corrected = figure1_discrepancy(theta, x_grid, 0.2, true);
        const std::vector<double> uncorrected = figure1_discrepancy(theta, x_grid, 0.2, false);
        for (std::size_t i = 0; i < x_grid.size(); ++i) {
            rows.push_back(Figure1Row{t, theta, x_grid[i], corrected[i], uncorrected[i]});
        }
    }
    return rows;
}

}  // namespace qpsr
