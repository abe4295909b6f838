#include "qpsr/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace qpsr {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    if (res.ec != std::errc{}) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return std::string(buf, res.ptr);
}

nlohmann::ordered_json model_to_json(const ReuploadingModel& model) {
    if (model.n_layers() < 1) {
        throw std::invalid_argument("model_to_json: only the layered ansatz serializes");
    }
    nlohmann::ordered_json j;
    j["n_layers"] = model.n_layers();
    j["params"] = model.params();
    return j;
}

ReuploadingModel model_from_json(const nlohmann::ordered_json& j) {
    if (!j.is_object() || !j.contains("n_layers") || !j.contains("params")) {
        throw std::invalid_argument("model JSON must contain n_layers and params");
    }
    return ReuploadingModel(j.at("n_layers").get<int>(), j.at("params").get<std::vector<double>>());
}

ReuploadingModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open model file: " + path.string());
    }
    nlohmann::ordered_json j;
    in >> j;
    return model_from_json(j);
}

void save_model(const std::filesystem::path& path, const ReuploadingModel& model) {
    write_text_file(path, model_to_json(model).dump(2) + "\n");
}

std::string stop_reason_name(StopReason reason) {
    return reason == StopReason::Threshold ? "threshold" : "max_epochs";
}

nlohmann::ordered_json train_report_to_json(const TrainReport& report) {
    nlohmann::ordered_json j;
    j["loss_history"] = report.loss_history;
    j["theta_best"] = report.theta_best;
    j["epochs_run"] = report.epochs_run;
    j["total_circuit_evals"] = report.total_circuit_evals;
    j["stop_reason"] = stop_reason_name(report.stop_reason);
    j["initial_loss"] = report.initial_loss;
    j["best_loss"] = report.best_loss;
    return j;
}

void write_predictions_csv(const std::filesystem::path& path, const PredictionStats& stats,
                           std::span<const double> exact, const NormalizedView& view) {
    std::ostringstream out;
    out << "x,mean_shots,std_shots,exact_theoretical,normalized_mean,normalized_low,normalized_high\n";
    for (std::size_t i = 0; i < stats.grid.size(); ++i) {
        out << format_double(stats.grid[i]) << ',' << format_double(stats.mean[i]) << ','
            << format_double(stats.stddev[i]) << ',' << format_double(exact[i]) << ','
            << format_double(view.normalized_mean[i]) << ',' << format_double(view.normalized_low[i])
            << ',' << format_double(view.normalized_high[i]) << '\n';
    }
    write_text_file(path, out.str());
}

void write_figure1_csv(const std::filesystem::path& path, std::span<const Figure1Row> rows) {
    std::ostringstream out;
    out << "theta_id,x,discrepancy_corrected,discrepancy_uncorrected\n";
    for (const auto& row : rows) {
        out << row.theta_id << ',' << format_double(row.x) << ','
            << format_double(row.discrepancy_corrected) << ','
            << format_double(row.discrepancy_uncorrected) << '\n';
    }
    write_text_file(path, out.str());
}

void write_gradcheck_csv(const std::filesystem::path& path, std::span<const GradcheckRow> rows) {
    std::ostringstream out;
    out << "param_index,psr,fd,analytic,abs_err_psr_fd\n";
    for (const auto& row : rows) {
        out << row.param_index << ',' << format_double(row.psr) << ',' << format_double(row.fd)
            << ',' << (row.analytic ? format_double(*row.analytic) : std::string{}) << ','
            << format_double(row.abs_err_psr_fd) << '\n';
    }
    write_text_file(path, out.str());
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

}  // namespace qpsr
