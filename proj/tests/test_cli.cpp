#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "loadcast/metrics.hpp"

namespace fs = std::filesystem;

namespace {

struct CmdResult {
    int exit_code;
    std::string output; // stdout + stderr interleaved
};

CmdResult run_cli(const std::string& args) {
    const std::string cmd = std::string(LOADCAST_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::size_t line_count(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

// pulls "MAE <x> RMSE <y>" off the tool's stdout
std::pair<double, double> printed_metrics(const std::string& out) {
    const std::size_t m = out.find("MAE ");
    const std::size_t r = out.find(" RMSE ");
    REQUIRE(m != std::string::npos);
    REQUIRE(r != std::string::npos);
    return {std::stod(out.substr(m + 4, r - m - 4)), std::stod(out.substr(r + 6))};
}

// strips the train_s/predict_s fields so reruns can be compared byte-wise
std::string strip_timing(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        std::string kept;
        std::size_t field = 0, start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i)
            if (i == line.size() || line[i] == ',') {
                if (field != 6 && field != 7) {
                    if (!kept.empty()) kept += ',';
                    kept += line.substr(start, i - start);
                }
                ++field;
                start = i + 1;
            }
        out += kept;
        out += '\n';
    }
    return out;
}

struct TmpDir {
    fs::path path;
    explicit TmpDir(const std::string& name) : path(name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TmpDir() { fs::remove_all(path); }
    std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

} // namespace

TEST_CASE("help lists the subcommands and every flag") {
    const CmdResult top = run_cli("--help");
    CHECK(top.exit_code == 0);
    for (const char* sub : {"generate", "benchmark", "train", "predict", "report"})
        CHECK(top.output.find(sub) != std::string::npos);

    const CmdResult bench = run_cli("benchmark --help");
    CHECK(bench.exit_code == 0);
    for (const char* flag : {"--config", "--data", "--synthetic-days", "--seed", "--models",
                             "--terms", "--runs", "--out", "--horizon"})
        CHECK(bench.output.find(flag) != std::string::npos);

    CHECK(run_cli("").exit_code == 1);          // a subcommand is required
    CHECK(run_cli("frobnicate").exit_code == 1);
}

TEST_CASE("generate writes a deterministic csv and reports the row count") {
    TmpDir dir("cli_gen_tmp");
    const std::string a = dir / "a.csv";
    const std::string b = dir / "b.csv";
    const CmdResult first = run_cli("generate --days 1 --seed 7 --out " + a);
    CHECK(first.exit_code == 0);
    CHECK(first.output.find("1440 rows") != std::string::npos);
    CHECK(line_count(slurp(a)) == 1441); // header + one day of minutes

    CHECK(run_cli("generate --days 1 --seed 7 --out " + b).exit_code == 0);
    CHECK(slurp(a) == slurp(b));

    const CmdResult other = run_cli("generate --days 1 --seed 8 --out " + b);
    CHECK(other.exit_code == 0);
    CHECK(slurp(a) != slurp(b));

    CHECK(run_cli("generate --days 1 --out /no/such/dir/x.csv").exit_code == 1);
}

TEST_CASE("benchmark writes the protocol artifacts and exits clean") {
    TmpDir dir("cli_bench_tmp");
    const std::string out = dir / "run";
    const CmdResult res = run_cli(
        "benchmark --synthetic-days 1 --seed 1 --models svr --terms vstelf --runs 2 --out " +
        out);
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("2 records, 0 failed") != std::string::npos);
    const std::string records = slurp(out + "/records.csv");
    CHECK(line_count(records) == 3); // header + 2 runs
    CHECK(records.rfind("model,term,run,", 0) == 0);
    CHECK(slurp(out + "/report.md").find("| SVR | ") != std::string::npos);
    CHECK(fs::exists(out + "/predictions_svr_vstelf_1.csv"));
    CHECK(fs::exists(out + "/predictions_svr_vstelf_2.csv"));

    // identical invocation reproduces the records minus wall-clock noise
    const std::string out2 = dir / "rerun";
    CHECK(run_cli("benchmark --synthetic-days 1 --seed 1 --models svr --terms vstelf "
                  "--runs 2 --out " +
                  out2)
              .exit_code == 0);
    CHECK(strip_timing(slurp(out2 + "/records.csv")) == strip_timing(records));
    CHECK(slurp(out2 + "/predictions_svr_vstelf_1.csv") ==
          slurp(out + "/predictions_svr_vstelf_1.csv"));
}

TEST_CASE("flag beats file beats default") {
    TmpDir dir("cli_prec_tmp");
    const std::string cfg_path = dir / "cfg.json";
    {
        std::ofstream cfg(cfg_path);
        cfg << R"({"runs": 1, "models": ["sbc"], "terms": ["vstelf"], "synthetic_days": 1})";
    }
    const std::string out = dir / "run";
    // file sets sbc; the flag must win with svr
    const CmdResult res = run_cli("benchmark --config " + cfg_path +
                                  " --models svr --out " + out);
    CHECK(res.exit_code == 0);
    const std::string records = slurp(out + "/records.csv");
    CHECK(records.find("SVR,") != std::string::npos);
    CHECK(records.find("SBC,") == std::string::npos);
    CHECK(line_count(records) == 2); // runs=1 came from the file
}

TEST_CASE("train prints metrics that match its own predictions file") {
    TmpDir dir("cli_train_tmp");
    const std::string out = dir / "artifacts";
    const CmdResult res =
        run_cli("train --model svr --term vstelf --synthetic-days 1 --seed 4 --out " + out);
    CHECK(res.exit_code == 0);
    const std::string model_path = out + "/svr_vstelf.model";
    REQUIRE(fs::exists(model_path));
    CHECK(slurp(model_path).rfind("SVR1", 0) == 0);

    const std::string preds = slurp(out + "/predictions_svr_vstelf_1.csv");
    std::istringstream in(preds);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "t,actual,predicted");
    std::vector<double> actual, predicted;
    while (std::getline(in, line)) {
        const std::size_t c1 = line.find(','), c2 = line.rfind(',');
        actual.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
        predicted.push_back(std::stod(line.substr(c2 + 1)));
    }
    REQUIRE(actual.size() == 9);
    const auto [mae_printed, rmse_printed] = printed_metrics(res.output);
    CHECK(std::abs(mae_printed - loadcast::mae(actual, predicted)) < 1e-12);
    CHECK(std::abs(rmse_printed - loadcast::rmse(actual, predicted)) < 1e-12);

    // a reloaded model predicts the same window identically
    const CmdResult pred = run_cli("predict --model-file " + model_path +
                                   " --term vstelf --synthetic-days 1 --seed 4 --out " + out);
    CHECK(pred.exit_code == 0);
    const auto [mae_pred, rmse_pred] = printed_metrics(pred.output);
    CHECK(mae_pred == mae_printed);
    CHECK(rmse_pred == rmse_printed);
    CHECK(slurp(out + "/predictions_svr_vstelf_1.csv") == preds);

    CHECK(run_cli("predict --model-file " + out +
                  "/predictions_svr_vstelf_1.csv --term vstelf --synthetic-days 1")
              .exit_code == 1); // not a model file
}

TEST_CASE("usage and configuration mistakes exit with code 1") {
    CHECK(run_cli("train --model svr --model frbs --term vstelf").exit_code == 1);
    CHECK(run_cli("train --term vstelf").exit_code == 1); // --model is required
    CHECK(run_cli("benchmark --models xgboost").exit_code == 1);
    CHECK(run_cli("benchmark --terms daily").exit_code == 1);
    CHECK(run_cli("benchmark --runs 0").exit_code == 1);

    TmpDir dir("cli_err_tmp");
    const std::string cfg_path = dir / "bad.json";
    {
        std::ofstream cfg(cfg_path);
        cfg << R"({"svr": {"epsilonn": 0.1}})";
    }
    const CmdResult bad = run_cli("benchmark --config " + cfg_path);
    CHECK(bad.exit_code == 1);
    CHECK(bad.output.find("svr.epsilonn") != std::string::npos);

    // a missing data file leaves no partial report behind
    const std::string out = dir / "never";
    CHECK(run_cli("benchmark --data " + (dir / "absent.csv") + " --out " + out).exit_code == 1);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("a failing cell yields exit 2 with the report still written") {
    TmpDir dir("cli_partial_tmp");
    const std::string cfg_path = dir / "cfg.json";
    {
        std::ofstream cfg(cfg_path);
        cfg << R"({"nn": {"lookback": 100}})"; // cannot fit a 60-row window
    }
    const std::string out = dir / "run";
    const CmdResult res = run_cli("benchmark --config " + cfg_path +
                                  " --synthetic-days 1 --models svr,brnn --terms vstelf "
                                  "--runs 1 --out " +
                                  out);
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("1 failed") != std::string::npos);
    const std::string records = slurp(out + "/records.csv");
    CHECK(records.find("BRNN,VSTELF,1") != std::string::npos);
    CHECK(records.find("error:") != std::string::npos);
    CHECK(slurp(out + "/report.md").find("| SVR | ") != std::string::npos);
}

TEST_CASE("report rebuilds the markdown from a records file") {
    TmpDir dir("cli_report_tmp");
    const std::string out = dir / "run";
    REQUIRE(run_cli("benchmark --synthetic-days 1 --seed 2 --models sbc --terms vstelf "
                    "--runs 1 --out " +
                    out)
                .exit_code == 0);
    const std::string rebuilt = dir / "rebuilt";
    const CmdResult res =
        run_cli("report --records " + out + "/records.csv --out " + rebuilt);
    CHECK(res.exit_code == 0);
    const std::string md = slurp(rebuilt + "/report.md");
    CHECK(md.find("| SBC | ") != std::string::npos);
    CHECK(md.find("not recorded") != std::string::npos);

    // the metric cells agree with the original report
    const std::string orig = slurp(out + "/report.md");
    const std::size_t cell = orig.find("| SBC | ");
    const std::string orig_row = orig.substr(cell, orig.find('\n', cell) - cell);
    CHECK(md.find(orig_row) != std::string::npos);

    CHECK(run_cli("report --records " + (dir / "none.csv")).exit_code == 1);
}
