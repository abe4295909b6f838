#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qpsr/experiment.hpp"
#include "qpsr/model.hpp"
#include "qpsr/optimizer.hpp"

namespace qpsr {

/// Shortest round-trip decimal form; stable across runs, so emitted files are
/// byte-identical under a fixed seed.
std::string format_double(double value);

/// Model persistence: flat {"n_layers": int, "params": [floats]}. Only the
/// standard layered ansatz serializes.
nlohmann::ordered_json model_to_json(const ReuploadingModel& model);
ReuploadingModel model_from_json(const nlohmann::ordered_json& j);
ReuploadingModel load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const ReuploadingModel& model);

std::string stop_reason_name(StopReason reason);
nlohmann::ordered_json train_report_to_json(const TrainReport& report);

struct GradcheckRow {
    std::size_t param_index = 0;
    double psr = 0.0;
    double fd = 0.0;
    std::optional<double> analytic;  // absent where no closed form applies
    double abs_err_psr_fd = 0.0;
};

void write_predictions_csv(const std::filesystem::path& path, const PredictionStats& stats,
                           std::span<const double> exact, const NormalizedView& view);
void write_figure1_csv(const std::filesystem::path& path, std::span<const Figure1Row> rows);
void write_gradcheck_csv(const std::filesystem::path& path, std::span<const GradcheckRow> rows);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace qpsr
