#include "qpsr/cmaes.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace qpsr {

namespace {

CmaState snapshot(const Eigen::VectorXd& mean, double sigma, const Eigen::MatrixXd& C,
                  const Eigen::VectorXd& ps, const Eigen::VectorXd& pc, int lambda, int gen) {
    const int n = static_cast<int>(mean.size());
    CmaState s;
    s.mean.assign(mean.data(), mean.data() + n);
    s.sigma = sigma;
    s.covariance.resize(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            s.covariance[static_cast<std::size_t>(r) * n + c] = C(r, c);
        }
    }
    s.path_sigma.assign(ps.data(), ps.data() + n);
    s.path_c.assign(pc.data(), pc.data() + n);
    s.lambda = lambda;
    s.generation = gen;
    return s;
}

}  // namespace

CmaesResult cmaes_minimize(const CmaesObjective& objective, std::span<const double> initial_mean,
                           const CmaesOptions& options) {
    const int n = static_cast<int>(initial_mean.size());
    if (n < 1) {
        throw std::invalid_argument("cmaes_minimize: dimension must be >= 1");
    }
    if (options.sigma0 <= 0.0) {
        throw std::invalid_argument("cmaes_minimize: sigma0 must be > 0");
    }
    if (options.max_generations < 1) {
        throw std::invalid_argument("n_epochs must be >= 1");
    }

    const int lambda = options.lambda.value_or(4 + static_cast<int>(std::floor(3.0 * std::log(n))));
    if (lambda < 2) {
        throw std::invalid_argument("cmaes_minimize: lambda must be >= 2");
    }
    const int mu = lambda / 2;

    Eigen::VectorXd weights(mu);
    for (int i = 0; i < mu; ++i) {
        weights(i) = std::log((lambda + 1) / 2.0) - std::log(i + 1.0);
    }
    weights /= weights.sum();
    const double mueff = 1.0 / weights.squaredNorm();

    const double cc = (4.0 + mueff / n) / (n + 4.0 + 2.0 * mueff / n);
    const double cs = (mueff + 2.0) / (n + mueff + 5.0);
    const double c1 = 2.0 / ((n + 1.3) * (n + 1.3) + mueff);
    const double cmu =
        std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((n + 2.0) * (n + 2.0) + mueff));
    const double damps =
        1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (n + 1.0)) - 1.0) + cs;
    const double chi_n = std::sqrt(static_cast<double>(n)) *
                         (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * static_cast<double>(n) * n));

    Eigen::VectorXd xmean = Eigen::Map<const Eigen::VectorXd>(initial_mean.data(), n);
    double sigma = options.sigma0;
    Eigen::MatrixXd C = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd ps = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd pc = Eigen::VectorXd::Zero(n);

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    CmaesResult result;
    std::vector<Eigen::VectorXd> offspring(static_cast<std::size_t>(lambda));
    std::vector<double> fitness(static_cast<std::size_t>(lambda));
    std::vector<int> order(static_cast<std::size_t>(lambda));

    for (int gen = 1; gen <= options.max_generations; ++gen) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
        if (eig.info() != Eigen::Success) {
            throw std::runtime_error("cmaes_minimize: covariance eigendecomposition failed");
        }
        const Eigen::VectorXd d = eig.eigenvalues().cwiseMax(1e-30).cwiseSqrt();
        const Eigen::MatrixXd& b = eig.eigenvectors();

        for (int k = 0; k < lambda; ++k) {
            Eigen::VectorXd z(n);
            for (int i = 0; i < n; ++i) {
                z(i) = gauss(rng);
            }
            offspring[static_cast<std::size_t>(k)] = xmean + sigma * (b * d.asDiagonal() * z);
            const auto& x = offspring[static_cast<std::size_t>(k)];
            fitness[static_cast<std::size_t>(k)] =
                objective(std::span<const double>(x.data(), static_cast<std::size_t>(n)), gen, k);
            ++result.n_evaluations;
        }

        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a2, int b2) {
            return fitness[static_cast<std::size_t>(a2)] < fitness[static_cast<std::size_t>(b2)];
        });

        const double gen_best = fitness[static_cast<std::size_t>(order[0])];
        result.fitness_history.push_back(gen_best);
        if (gen_best < result.best_fitness) {
            result.best_fitness = gen_best;
            const auto& x = offspring[static_cast<std::size_t>(order[0])];
            result.best_x.assign(x.data(), x.data() + n);
        }
        result.generations = gen;

        const Eigen::VectorXd xold = xmean;
        xmean.setZero();
        for (int i = 0; i < mu; ++i) {
            xmean += weights(i) * offspring[static_cast<std::size_t>(order[i])];
        }

        const Eigen::VectorXd y = (xmean - xold) / sigma;
        const Eigen::VectorXd c_invsqrt_y = b * (b.transpose() * y).cwiseQuotient(d);
        ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * c_invsqrt_y;
        const double ps_norm = ps.norm();
        const bool hsig = ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * gen)) / chi_n <
                          1.4 + 2.0 / (n + 1.0);
        pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * y;

        Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < mu; ++i) {
            const Eigen::VectorXd yi = (offspring[static_cast<std::size_t>(order[i])] - xold) / sigma;
            rank_mu += weights(i) * yi * yi.transpose();
        }
        C = (1.0 - c1 - cmu) * C +
            c1 * (pc * pc.transpose() + (hsig ? 0.0 : cc * (2.0 - cc)) * C) + cmu * rank_mu;
        C = 0.5 * (C + C.transpose().eval());

        sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));

        if (options.on_generation) {
            options.on_generation(snapshot(xmean, sigma, C, ps, pc, lambda, gen));
        }
        if (result.best_fitness <= options.target_fitness) {
            result.reached_target = true;
            break;
        }
    }
    return result;
}

TrainReport train_cmaes(const ReuploadingModel& model, const Dataset& data, const Executor& exec,
                        const TrainConfig& cfg) {
    if (model.n_params() < 1) {
        throw std::invalid_argument("train_cmaes: model has no parameters");
    }
    const std::uint64_t evals_before = exec.eval_count();

    TrainReport report;
    report.initial_loss = mse_loss(model, data, exec, EvalTag{0, 0, 0, 0}, cfg.loss_norm);

    CmaesOptions opt;
    opt.sigma0 = cfg.cma_sigma0;
    opt.max_generations = cfg.max_epochs;
    opt.target_fitness = cfg.eps_j;
    opt.lambda = cfg.cma_lambda;
    opt.seed = derive_substream(exec.config().master_seed, StreamPurpose::TrainCmaes);

    const CmaesObjective objective = [&](std::span<const double> x, int gen, int member) {
        EvalTag tag;
        tag.epoch = static_cast<std::uint64_t>(gen);
        tag.param_index = static_cast<std::uint64_t>(member);
        return mse_loss(model.with_params(std::vector<double>(x.begin(), x.end())), data, exec, tag,
                        cfg.loss_norm);
    };
    const CmaesResult res = cmaes_minimize(objective, model.params(), opt);

    report.loss_history = res.fitness_history;
    report.epochs_run = res.generations;
    report.stop_reason = res.reached_target ? StopReason::Threshold : StopReason::MaxEpochs;
    if (res.best_fitness < report.initial_loss) {
        report.best_loss = res.best_fitness;
        report.theta_best = res.best_x;
    } else {
        report.best_loss = report.initial_loss;
        report.theta_best = model.params();
    }
    report.total_circuit_evals = exec.eval_count() - evals_before;
    return report;
}

}  // namespace qpsr
