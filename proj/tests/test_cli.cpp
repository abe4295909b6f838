#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const char* cli_path() { return QPSR_CLI_PATH; }

int run_cli(const std::string& args) {
    const std::string cmd = std::string(cli_path()) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string capture_stderr(const std::string& args) {
    const fs::path tmp = fs::temp_directory_path() / "qpsr_cli_stderr.txt";
    const std::string cmd =
        std::string(cli_path()) + " " + args + " > /dev/null 2> " + tmp.string();
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    std::ifstream in(tmp);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

std::size_t count_data_rows(const fs::path& csv) {
    std::ifstream in(csv);
    REQUIRE(in.good());
    std::string line;
    std::size_t rows = 0;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (!line.empty()) {
            ++rows;
        }
    }
    return rows;
}

}  // namespace

TEST_CASE("cli rejects degenerate configurations with exit 2") {
    CHECK(run_cli("train --epochs 0") == 2);
    CHECK(capture_stderr("train --epochs 0").find("n_epochs must be >= 1") != std::string::npos);
    CHECK(run_cli("figure1 --thetas 0") == 2);
    CHECK(run_cli("train --eta 0") == 2);
    CHECK(run_cli("no-such-command") == 2);
    CHECK(run_cli("train --config /nonexistent/config.json") == 2);
    CHECK(run_cli("predict --model /nonexistent/model.json") == 2);
}

TEST_CASE("cli help exits 0") {
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("train --help") == 0);
}

TEST_CASE("train writes report, predictions and model") {
    TempDir dir("qpsr_cli_train");
    const int rc = run_cli("train --out " + dir.str());
    CHECK(rc == 0);
    CHECK(fs::exists(dir.path / "report.json"));
    CHECK(fs::exists(dir.path / "predictions.csv"));
    CHECK(fs::exists(dir.path / "model.json"));

    const auto report = nlohmann::ordered_json::parse(slurp(dir.path / "report.json"));
    CHECK(report.at("dataset").at("xs").size() == 25);  // default dataset size
    CHECK(report.at("config").at("n_shots") == 1024);
    CHECK(report.at("config").at("eta") == 0.1);
    CHECK(report.at("config").at("n_epochs") == 100);
    CHECK(report.at("config").at("eps_j") == 5e-3);
    CHECK(report.at("train_report").contains("loss_history"));
    CHECK(report.at("train_report").contains("stop_reason"));
    CHECK(count_data_rows(dir.path / "predictions.csv") == 100);
}

TEST_CASE("config file values apply where flags are absent") {
    TempDir dir("qpsr_cli_config");
    const fs::path cfg = dir.path / "config.json";
    std::ofstream(cfg) << R"({"epochs": 3, "data": 7, "reps": 2, "grid": 5, "eps_j": -1.0})";
    const int rc = run_cli("train --config " + cfg.string() + " --out " + dir.str() +
                           " --epochs 4");
    CHECK(rc == 0);
    const auto report = nlohmann::ordered_json::parse(slurp(dir.path / "report.json"));
    CHECK(report.at("config").at("n_epochs") == 4);  // flag wins
    CHECK(report.at("config").at("n_data") == 7);    // file fills the rest
    CHECK(report.at("dataset").at("xs").size() == 7);
    CHECK(report.at("train_report").at("epochs_run") == 4);
}

TEST_CASE("gradcheck row count and exit codes") {
    TempDir dir("qpsr_cli_gradcheck");
    SUBCASE("one-layer run emits trials x 3 rows and passes") {
        const int rc = run_cli("gradcheck --layers 1 --trials 10 --out " + dir.str());
        CHECK(rc == 0);
        CHECK(count_data_rows(dir.path / "gradcheck.csv") == 30);
        // analytic column is populated for L = 1
        std::ifstream in(dir.path / "gradcheck.csv");
        std::string header, first;
        std::getline(in, header);
        std::getline(in, first);
        CHECK(header == "param_index,psr,fd,analytic,abs_err_psr_fd");
        CHECK(first.find(",,") == std::string::npos);
    }
    SUBCASE("impossible tolerance fails with exit 1, CSV still written") {
        const int rc = run_cli("gradcheck --trials 5 --tolerance 0 --out " + dir.str());
        CHECK(rc == 1);
        CHECK(fs::exists(dir.path / "gradcheck.csv"));
    }
}

TEST_CASE("figure1 emits the requested number of rotations") {
    TempDir dir("qpsr_cli_figure1");
    const int rc = run_cli("figure1 --thetas 5 --out " + dir.str());
    CHECK(rc == 0);
    std::ifstream in(dir.path / "figure1.csv");
    std::string line;
    std::getline(in, line);  // header
    std::set<std::string> ids;
    while (std::getline(in, line)) {
        ids.insert(line.substr(0, line.find(',')));
    }
    CHECK(ids.size() == 5);
}

TEST_CASE("predict consumes a persisted model") {
    TempDir dir("qpsr_cli_predict");
    const fs::path model = dir.path / "model.json";
    std::ofstream(model) << R"({"n_layers": 1, "params": [1.0, 0.0, 0.0]})";
    const int rc = run_cli("predict --model " + model.string() + " --reps 3 --grid 11 --out " +
                           dir.str());
    CHECK(rc == 0);
    CHECK(count_data_rows(dir.path / "predictions.csv") == 11);
}

TEST_CASE("compare trains both optimizers") {
    TempDir dir("qpsr_cli_compare");
    const int rc = run_cli("compare --epochs 10 --data 8 --reps 3 --grid 10 --out " + dir.str());
    CHECK(rc == 0);
    CHECK(fs::exists(dir.path / "predictions_psr_adam.csv"));
    CHECK(fs::exists(dir.path / "predictions_cmaes.csv"));
    CHECK(fs::exists(dir.path / "report_psr_adam.json"));
    CHECK(fs::exists(dir.path / "report_cmaes.json"));
}

TEST_CASE("identical seeds produce byte-identical artifacts") {
    TempDir a("qpsr_cli_det_a");
    TempDir b("qpsr_cli_det_b");
    const std::string flags = " --seed 7 --epochs 5 --data 6 --reps 4 --grid 8 --eps-j -1";
    CHECK(run_cli("train --out " + a.str() + flags) == 0);
    CHECK(run_cli("train --out " + b.str() + flags) == 0);
    for (const char* name : {"report.json", "predictions.csv", "model.json"}) {
        CHECK(slurp(a.path / name) == slurp(b.path / name));
    }

    TempDir c("qpsr_cli_det_c");
    const std::string other = " --seed 8 --epochs 5 --data 6 --reps 4 --grid 8 --eps-j -1";
    CHECK(run_cli("train --out " + c.str() + other) == 0);
    CHECK(slurp(a.path / "report.json") != slurp(c.path / "report.json"));
}
