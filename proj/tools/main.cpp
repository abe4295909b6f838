#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpsr/cmaes.hpp"
#include "qpsr/experiment.hpp"
#include "qpsr/gradient.hpp"
#include "qpsr/io.hpp"
#include "qpsr/model.hpp"
#include "qpsr/optimizer.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Exit-code contract: 0 success, 1 check failure, 2 usage/config/IO error.
constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
    int n_layers = 3;
    int n_data = 25;
    std::int64_t n_shots = 1024;
    double eta = 0.1;
    int n_epochs = 100;
    double eps_j = 5e-3;
    std::uint64_t seed = 12345;
    bool exact = false;  // train with the noiseless executor
    std::string optimizer = "psr_adam";
    std::string out_dir = ".";
    int n_reps = 100;
    int n_grid = 100;
    // gradcheck / figure1
    int trials = 200;
    double tolerance = 1e-6;
    int thetas = 5;
    int fig_grid = 101;
    std::string model_file;
    std::string config_file;
};

/// Registers --config plus a JSON override: file values apply to every option
/// the command line left untouched.
class ConfigMerger {
  public:
    explicit ConfigMerger(CLI::App* cmd, RunConfig& cfg) : cmd_(cmd), cfg_(cfg) {
        cmd->add_option("--config", cfg.config_file, "JSON config file (flags take precedence)");
    }

    template <typename T>
    void bind(const std::string& flag, const std::string& key, T& target) {
        keys_.emplace_back(flag, [key, &target](const ordered_json& j) {
            if (j.contains(key)) {
                target = j.at(key).get<T>();
            }
        });
    }

    void apply() const {
        if (cfg_.config_file.empty()) {
            return;
        }
        std::ifstream in(cfg_.config_file);
        if (!in) {
            throw std::runtime_error("cannot read config file: " + cfg_.config_file);
        }
        ordered_json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw std::runtime_error("config file is not valid JSON: " + std::string(e.what()));
        }
        for (const auto& [flag, apply_key] : keys_) {
            const CLI::Option* opt = cmd_->get_option(flag);
            if (opt->count() == 0) {
                apply_key(j);
            }
        }
    }

  private:
    CLI::App* cmd_;
    RunConfig& cfg_;
    std::vector<std::pair<std::string, std::function<void(const ordered_json&)>>> keys_;
};

void validate_common(const RunConfig& cfg) {
    if (cfg.n_epochs < 1) {
        throw std::invalid_argument("n_epochs must be >= 1");
    }
    if (cfg.eta <= 0.0) {
        throw std::invalid_argument("eta must be > 0");
    }
    if (cfg.n_layers < 1) {
        throw std::invalid_argument("n_layers must be >= 1");
    }
    if (cfg.n_data < 1) {
        throw std::invalid_argument("n_data must be >= 1");
    }
    if (cfg.n_shots < 1) {
        throw std::invalid_argument("n_shots must be >= 1");
    }
    if (cfg.n_reps < 1 || cfg.n_grid < 1) {
        throw std::invalid_argument("prediction grid and repetitions must be >= 1");
    }
    if (cfg.optimizer != "psr_adam" && cfg.optimizer != "cmaes") {
        throw std::invalid_argument("optimizer must be psr_adam or cmaes");
    }
}

qpsr::ExperimentConfig to_experiment_config(const RunConfig& cfg) {
    qpsr::ExperimentConfig ec;
    ec.n_layers = cfg.n_layers;
    ec.n_data = cfg.n_data;
    ec.n_shots = cfg.n_shots;
    ec.train_mode = cfg.exact ? qpsr::ExecMode::Exact : qpsr::ExecMode::Shots;
    ec.train.eta = cfg.eta;
    ec.train.max_epochs = cfg.n_epochs;
    ec.train.eps_j = cfg.eps_j;
    ec.master_seed = cfg.seed;
    ec.n_grid = cfg.n_grid;
    ec.n_reps = cfg.n_reps;
    return ec;
}

ordered_json config_echo(const RunConfig& cfg, const std::string& optimizer) {
    ordered_json j;
    j["n_layers"] = cfg.n_layers;
    j["n_data"] = cfg.n_data;
    j["n_shots"] = cfg.n_shots;
    j["eta"] = cfg.eta;
    j["n_epochs"] = cfg.n_epochs;
    j["eps_j"] = cfg.eps_j;
    j["executor"] = cfg.exact ? "exact" : "shots";
    j["optimizer"] = optimizer;
    j["n_grid"] = cfg.n_grid;
    j["n_reps"] = cfg.n_reps;
    return j;
}

void write_experiment_outputs(const fs::path& dir, const RunConfig& cfg,
                              const std::string& optimizer, const qpsr::ExperimentResult& result,
                              const std::string& suffix) {
    const std::string tag = suffix.empty() ? "" : "_" + suffix;

    ordered_json report;
    report["config"] = config_echo(cfg, optimizer);
    report["master_seed"] = cfg.seed;
    report["dataset"] = {{"xs", result.dataset.xs}, {"ys", result.dataset.ys}};
    report["theta0"] = result.theta0;
    report["train_report"] = qpsr::train_report_to_json(result.train);
    qpsr::write_text_file(dir / ("report" + tag + ".json"), report.dump(2) + "\n");

    qpsr::write_predictions_csv(dir / ("predictions" + tag + ".csv"), result.stats,
                                result.exact_theoretical, result.view);

    const qpsr::ReuploadingModel best(cfg.n_layers, result.train.theta_best);
    qpsr::save_model(dir / ("model" + tag + ".json"), best);
}

int cmd_train(const RunConfig& cfg) {
    validate_common(cfg);
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    const auto kind = cfg.optimizer == "cmaes" ? qpsr::OptimizerKind::Cmaes
                                               : qpsr::OptimizerKind::PsrAdam;
    const auto result = qpsr::run_regression_experiment(to_experiment_config(cfg), kind);
    write_experiment_outputs(dir, cfg, cfg.optimizer, result, "");
    std::cout << "train: stop=" << qpsr::stop_reason_name(result.train.stop_reason)
              << " epochs=" << result.train.epochs_run << " best_J="
              << qpsr::format_double(result.train.best_loss) << "\n";
    return kExitOk;
}

int cmd_compare(const RunConfig& cfg) {
    validate_common(cfg);
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    for (const auto& [name, kind] :
         {std::pair<std::string, qpsr::OptimizerKind>{"psr_adam", qpsr::OptimizerKind::PsrAdam},
          std::pair<std::string, qpsr::OptimizerKind>{"cmaes", qpsr::OptimizerKind::Cmaes}}) {
        const auto result = qpsr::run_regression_experiment(to_experiment_config(cfg), kind);
        write_experiment_outputs(dir, cfg, name, result, name);
        std::cout << "compare[" << name << "]: stop="
                  << qpsr::stop_reason_name(result.train.stop_reason)
                  << " epochs=" << result.train.epochs_run << " best_J="
                  << qpsr::format_double(result.train.best_loss) << "\n";
    }
    return kExitOk;
}

int cmd_gradcheck(const RunConfig& cfg) {
    if (cfg.trials < 1) {
        throw std::invalid_argument("trials must be >= 1");
    }
    if (cfg.tolerance < 0.0) {
        throw std::invalid_argument("tolerance must be >= 0");
    }
    if (cfg.n_layers < 1) {
        throw std::invalid_argument("n_layers must be >= 1");
    }
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);

    const qpsr::Executor exec = qpsr::Executor::exact();
    auto rng = qpsr::make_engine(qpsr::derive_substream(cfg.seed, qpsr::StreamPurpose::Gradcheck));
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> feature(-1.0, 1.0);
    const std::size_t p = static_cast<std::size_t>(3 * cfg.n_layers);

    std::vector<qpsr::GradcheckRow> rows;
    rows.reserve(static_cast<std::size_t>(cfg.trials) * p);
    double max_err = 0.0;
    for (int trial = 0; trial < cfg.trials; ++trial) {
        std::vector<double> theta(p);
        for (auto& t : theta) {
            t = angle(rng);
        }
        const qpsr::ReuploadingModel model(cfg.n_layers, theta);
        const double x = feature(rng);
        for (std::size_t i = 0; i < p; ++i) {
            qpsr::GradcheckRow row;
            row.param_index = i;
            row.psr = model.is_scale_param(i) ? qpsr::psr_partial_scaled(model, x, exec, i)
                                              : qpsr::psr_partial_plain(model, x, exec, i);
            row.fd = qpsr::fd_partial(model, x, i, 1e-5);
            if (cfg.n_layers == 1) {
                const double a = theta[0] * x + theta[1];
                if (i == 0) {
                    row.analytic = -std::sin(a) * x;
                } else if (i == 1) {
                    row.analytic = -std::sin(a);
                } else {
                    row.analytic = 0.0;
                }
            }
            row.abs_err_psr_fd = std::abs(row.psr - row.fd);
            max_err = std::max(max_err, row.abs_err_psr_fd);
            rows.push_back(row);
        }
    }
    qpsr::write_gradcheck_csv(dir / "gradcheck.csv", rows);
    std::cout << "gradcheck: " << rows.size() << " rows, max |psr - fd| = "
              << qpsr::format_double(max_err) << " (tolerance "
              << qpsr::format_double(cfg.tolerance) << ")\n";
    return max_err <= cfg.tolerance ? kExitOk : kExitCheckFailed;
}

int cmd_figure1(const RunConfig& cfg) {
    if (cfg.thetas < 1) {
        throw std::invalid_argument("thetas must be >= 1");
    }
    if (cfg.fig_grid < 1) {
        throw std::invalid_argument("grid must be >= 1");
    }
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    const auto grid = qpsr::linspace(-1.0, 1.0, cfg.fig_grid);
    const auto rows = qpsr::run_figure1_experiment(cfg.thetas, grid, cfg.seed);
    qpsr::write_figure1_csv(dir / "figure1.csv", rows);
    std::cout << "figure1: " << rows.size() << " rows for " << cfg.thetas << " thetas\n";
    return kExitOk;
}

int cmd_predict(const RunConfig& cfg) {
    if (cfg.model_file.empty()) {
        throw std::invalid_argument("--model is required");
    }
    if (cfg.n_reps < 1 || cfg.n_grid < 1 || cfg.n_shots < 1) {
        throw std::invalid_argument("prediction settings must be >= 1");
    }
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);

    const qpsr::ReuploadingModel model = qpsr::load_model(cfg.model_file);
    const qpsr::Executor exec = qpsr::Executor::shots(
        cfg.n_shots, qpsr::derive_substream(cfg.seed, qpsr::StreamPurpose::Predict));
    const auto grid = qpsr::linspace(-1.0, 1.0, cfg.n_grid);
    const auto stats = qpsr::predict_stats(model, exec, grid, cfg.n_reps);
    const auto exact = qpsr::exact_curve(model, grid);
    std::vector<double> law;
    law.reserve(grid.size());
    for (const double x : grid) {
        law.push_back(qpsr::target_law(x));
    }
    const auto view = qpsr::make_normalized_view(stats.mean, stats.stddev, law, 10.0);
    qpsr::write_predictions_csv(dir / "predictions.csv", stats, exact, view);
    std::cout << "predict: " << grid.size() << " points x " << cfg.n_reps << " repetitions\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-qubit re-uploading regression trained with parameter-shift gradients"};
    app.require_subcommand(1);

    RunConfig cfg;

    auto add_shared = [&](CLI::App* cmd, ConfigMerger& merge) {
        cmd->add_option("--seed", cfg.seed, "master seed; all randomness derives from it");
        cmd->add_option("--out", cfg.out_dir, "output directory");
        merge.bind("--seed", "seed", cfg.seed);
        merge.bind("--out", "out", cfg.out_dir);
    };

    auto add_train_like = [&](CLI::App* cmd, ConfigMerger& merge) {
        add_shared(cmd, merge);
        cmd->add_option("--layers", cfg.n_layers, "ansatz layers L (p = 3L)");
        cmd->add_option("--data", cfg.n_data, "training points on [-1, 1]");
        cmd->add_option("--shots", cfg.n_shots, "measurement shots per estimate");
        cmd->add_flag("--exact", cfg.exact, "train with the noiseless executor");
        cmd->add_option("--eta", cfg.eta, "Adam learning rate");
        cmd->add_option("--epochs", cfg.n_epochs, "epoch (or generation) budget");
        cmd->add_option("--eps-j", cfg.eps_j, "early-stop loss threshold");
        cmd->add_option("--reps", cfg.n_reps, "prediction repetitions per grid point");
        cmd->add_option("--grid", cfg.n_grid, "prediction grid points");
        merge.bind("--layers", "layers", cfg.n_layers);
        merge.bind("--data", "data", cfg.n_data);
        merge.bind("--shots", "shots", cfg.n_shots);
        merge.bind("--exact", "exact", cfg.exact);
        merge.bind("--eta", "eta", cfg.eta);
        merge.bind("--epochs", "epochs", cfg.n_epochs);
        merge.bind("--eps-j", "eps_j", cfg.eps_j);
        merge.bind("--reps", "reps", cfg.n_reps);
        merge.bind("--grid", "grid", cfg.n_grid);
    };

    CLI::App* train = app.add_subcommand("train", "train and emit report, predictions and model");
    ConfigMerger train_merge(train, cfg);
    add_train_like(train, train_merge);
    train->add_option("--optimizer", cfg.optimizer, "psr_adam or cmaes");
    train_merge.bind("--optimizer", "optimizer", cfg.optimizer);

    CLI::App* compare = app.add_subcommand("compare", "train both optimizers side by side");
    ConfigMerger compare_merge(compare, cfg);
    add_train_like(compare, compare_merge);

    CLI::App* gradcheck =
        app.add_subcommand("gradcheck", "shift-rule partials vs the finite-difference oracle");
    ConfigMerger gradcheck_merge(gradcheck, cfg);
    add_shared(gradcheck, gradcheck_merge);
    gradcheck->add_option("--layers", cfg.n_layers, "ansatz layers L");
    gradcheck->add_option("--trials", cfg.trials, "random (theta, x) draws");
    gradcheck->add_option("--tolerance", cfg.tolerance, "max allowed |psr - fd|");
    gradcheck_merge.bind("--layers", "layers", cfg.n_layers);
    gradcheck_merge.bind("--trials", "trials", cfg.trials);
    gradcheck_merge.bind("--tolerance", "tolerance", cfg.tolerance);

    CLI::App* figure1 =
        app.add_subcommand("figure1", "corrected vs uncorrected shift-rule discrepancies");
    ConfigMerger figure1_merge(figure1, cfg);
    add_shared(figure1, figure1_merge);
    figure1->add_option("--thetas", cfg.thetas, "random rotation draws");
    figure1->add_option("--grid", cfg.fig_grid, "grid points on [-1, 1]");
    figure1_merge.bind("--thetas", "thetas", cfg.thetas);
    figure1_merge.bind("--grid", "grid", cfg.fig_grid);

    CLI::App* predict = app.add_subcommand("predict", "prediction statistics for a saved model");
    ConfigMerger predict_merge(predict, cfg);
    add_shared(predict, predict_merge);
    predict->add_option("--model", cfg.model_file, "model JSON ({n_layers, params})");
    predict->add_option("--shots", cfg.n_shots, "measurement shots per estimate");
    predict->add_option("--reps", cfg.n_reps, "repetitions per grid point");
    predict->add_option("--grid", cfg.n_grid, "grid points");
    predict_merge.bind("--model", "model", cfg.model_file);
    predict_merge.bind("--shots", "shots", cfg.n_shots);
    predict_merge.bind("--reps", "reps", cfg.n_reps);
    predict_merge.bind("--grid", "grid", cfg.n_grid);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (train->parsed()) {
            train_merge.apply();
            return cmd_train(cfg);
        }
        if (compare->parsed()) {
            compare_merge.apply();
            return cmd_compare(cfg);
        }
        if (gradcheck->parsed()) {
            gradcheck_merge.apply();
            return cmd_gradcheck(cfg);
        }
        if (figure1->parsed()) {
            figure1_merge.apply();
            return cmd_figure1(cfg);
        }
        if (predict->parsed()) {
            predict_merge.apply();
            return cmd_predict(cfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
