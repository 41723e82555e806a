#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "loadcast/bench.hpp"
#include "loadcast/config.hpp"
#include "loadcast/csv.hpp"
#include "loadcast/synthetic.hpp"

using namespace loadcast;

namespace {

// exit contract: 0 ok, 1 configuration/data error, 2 partial benchmark failure
constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kPartialFailure = 2;

// Flag values shared by benchmark/train/predict; presence is tracked through
// the subcommand's count() so that flag > file > default holds.
struct SharedFlags {
    std::string config_path, data, models, terms, out;
    std::uint64_t seed = 0;
    std::size_t synthetic_days = 0, runs = 0, horizon = 0;
};

void add_shared_flags(CLI::App* sc, SharedFlags& f) {
    sc->add_option("--config", f.config_path, "JSON config file (flags override file values)");
    sc->add_option("--data", f.data, "input CSV on the house-power schema");
    sc->add_option("--synthetic-days", f.synthetic_days,
                   "days of synthetic data when no CSV is given");
    sc->add_option("--seed", f.seed, "master seed for window draws and training");
    sc->add_option("--models", f.models, "comma list of svr,sbc,brnn");
    sc->add_option("--terms", f.terms, "comma list of vstelf,stelf,mtelf");
    sc->add_option("--runs", f.runs, "windows per term");
    sc->add_option("--out", f.out, "output directory");
    sc->add_option("--horizon", f.horizon, "forecast steps ahead");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i)
        if (i == s.size() || s[i] == ',') {
            if (i > start) out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    return out;
}

AppConfig build_config(const CLI::App* sc, const SharedFlags& f) {
    AppConfig cfg = f.config_path.empty() ? AppConfig{} : parse_config(f.config_path);
    if (sc->count("--data")) cfg.data_csv = f.data;
    if (sc->count("--synthetic-days")) {
        if (f.synthetic_days == 0) throw TypeMismatch("synthetic_days", "must be at least 1");
        cfg.synthetic_days = f.synthetic_days;
    }
    if (sc->count("--seed")) cfg.bench.seed = f.seed;
    if (sc->count("--runs")) cfg.bench.runs = f.runs;
    if (sc->count("--horizon")) cfg.bench.horizon = f.horizon;
    if (sc->count("--out")) cfg.out_dir = f.out;
    if (sc->count("--models")) {
        cfg.bench.models.clear();
        for (const auto& name : split_list(f.models))
            cfg.bench.models.push_back(model_kind_from_name(name));
    }
    if (sc->count("--terms")) {
        cfg.bench.terms.clear();
        for (const auto& name : split_list(f.terms))
            cfg.bench.terms.push_back(term_from_name(name));
    }
    cfg.bench.validate();
    return cfg;
}

TimeSeriesFrame load_data(const AppConfig& cfg) {
    if (!cfg.data_csv.empty()) return load_csv(cfg.data_csv, ColumnSchema::house_power());
    return generate_synthetic(static_cast<int>(cfg.synthetic_days), cfg.synthetic_seed);
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Builds the same window the benchmark would use for (term, run 1).
PreparedWindow first_window(const TimeSeriesFrame& frame, const AppConfig& cfg, Term term,
                            bool want_sequences, std::size_t* offset = nullptr) {
    TermConfig tc = cfg.bench.term_config(term);
    tc.window_count = 1;
    const TimeSeriesFrame resampled = frame.step_minutes() == tc.sampling_minutes
                                          ? frame
                                          : resample_mean(frame, tc.sampling_minutes);
    const auto windows = sample_windows(resampled, tc, derive_term_seed(cfg.bench.seed, term));
    if (offset)
        *offset = static_cast<std::size_t>(
            (windows[0].first.timestamps().front() - resampled.timestamps().front()) /
            resampled.step_minutes());
    return prepare_window(windows[0].first, windows[0].second, cfg.bench, tc, want_sequences);
}

int cmd_generate(std::size_t days, std::uint64_t seed, const std::string& out_path) {
    const TimeSeriesFrame frame = generate_synthetic(static_cast<int>(days), seed);
    write_csv(frame, out_path);
    std::printf("wrote %zu rows to %s\n", frame.size(), out_path.c_str());
    return kOk;
}

int cmd_benchmark(const AppConfig& cfg) {
    const TimeSeriesFrame frame = load_data(cfg);
    const BenchmarkReport report = run_benchmark(frame, cfg.bench);
    write_benchmark_outputs(report, cfg.out_dir);
    std::size_t failed = 0;
    for (const auto& r : report.records) failed += r.failed ? 1 : 0;
    std::printf("wrote %s/report.md (%zu records, %zu failed)\n", cfg.out_dir.c_str(),
                report.records.size(), failed);
    return failed ? kPartialFailure : kOk;
}

int cmd_train(const AppConfig& cfg, ModelKind model, Term term) {
    const TimeSeriesFrame frame = load_data(cfg);
    const PreparedWindow wd = first_window(frame, cfg, term, model == ModelKind::brnn);
    const std::uint64_t cell_seed = derive_cell_seed(cfg.bench.seed, term, 1);

    RunRecord rec;
    rec.model = model;
    rec.term = term;
    rec.run_index = 1;
    std::filesystem::create_directories(cfg.out_dir);
    const std::string model_path = cfg.out_dir + "/" + lower(model_kind_name(model)) + "_" +
                                   lower(term_name(term)) + ".model";

    if (model == ModelKind::svr) {
        const SvrModel m = train_svr(wd.sup_train, cfg.bench.svr, cfg.bench.kernel, cell_seed);
        save_svr(m, model_path);
        rec.predicted.resize(wd.sup_test.X.rows);
        for (std::size_t i = 0; i < rec.predicted.size(); ++i)
            rec.predicted[i] = predict_svr(m, wd.sup_test.X.row(i));
        rec.actual = wd.sup_test.y;
    } else if (model == ModelKind::sbc) {
        const FuzzyRuleBase m = train_frbs(wd.sup_train, cfg.bench.sbc, cfg.bench.fcm);
        save_frbs(m, model_path);
        rec.predicted.resize(wd.sup_test.X.rows);
        for (std::size_t i = 0; i < rec.predicted.size(); ++i)
            rec.predicted[i] = predict_frbs(m, wd.sup_test.X.row(i));
        rec.actual = wd.sup_test.y;
    } else {
        if (!wd.seqs_ok) throw ToolkitError(wd.seqs_error);
        NetworkArch arch;
        arch.kind = NetKind::brnn;
        arch.hidden = cfg.bench.nn_hidden;
        arch.lookback = cfg.bench.nn_lookback;
        arch.input_dim = wd.seqs.training.attributes;
        TrainHyper hp = cfg.bench.nn;
        hp.seed = cell_seed;
        const auto [m, log] = train_network(arch, wd.seqs.training, wd.seqs.verification, hp);
        save_nn(m, model_path);
        rec.predicted.resize(wd.seqs.test.samples);
        for (std::size_t i = 0; i < rec.predicted.size(); ++i)
            rec.predicted[i] = predict_nn(m, wd.seqs.test.sample(i));
        rec.actual = wd.seqs.test.y;
    }
    impute_nonfinite(rec.predicted, wd.train_target_mean);
    rec.metrics = metric_pair(rec.actual, rec.predicted);

    const std::string pred_path = cfg.out_dir + "/" + predictions_filename(rec);
    write_text(pred_path, render_predictions_csv(rec));
    std::printf("model: %s\npredictions: %s\n", model_path.c_str(), pred_path.c_str());
    std::printf("MAE %.17g RMSE %.17g\n", rec.metrics.mae, rec.metrics.rmse);
    return kOk;
}

int cmd_predict(const AppConfig& cfg, const std::string& model_file, Term term) {
    std::ifstream probe(model_file);
    if (!probe) throw FileNotFound(model_file);
    std::string magic;
    probe >> magic;
    probe.close();

    AppConfig local = cfg;
    RunRecord rec;
    rec.term = term;
    rec.run_index = 1;

    if (magic == "SVR1") {
        rec.model = ModelKind::svr;
        const SvrModel m = load_svr(model_file);
        const PreparedWindow wd = first_window(load_data(local), local, term, false);
        rec.predicted.resize(wd.sup_test.X.rows);
        for (std::size_t i = 0; i < rec.predicted.size(); ++i)
            rec.predicted[i] = predict_svr(m, wd.sup_test.X.row(i));
        rec.actual = wd.sup_test.y;
        impute_nonfinite(rec.predicted, wd.train_target_mean);
    } else if (magic == "FRB1") {
        rec.model = ModelKind::sbc;
        const FuzzyRuleBase m = load_frbs(model_file);
        const PreparedWindow wd = first_window(load_data(local), local, term, false);
        rec.predicted.resize(wd.sup_test.X.rows);
        for (std::size_t i = 0; i < rec.predicted.size(); ++i)
            rec.predicted[i] = predict_frbs(m, wd.sup_test.X.row(i));
        rec.actual = wd.sup_test.y;
        impute_nonfinite(rec.predicted, wd.train_target_mean);
    } else if (magic == "BRNN1") {
        rec.model = ModelKind::brnn;
        const NeuralModel m = load_nn(model_file);
        local.bench.nn_lookback = m.arch.lookback; // window must match the model
        const PreparedWindow wd = first_window(load_data(local), local, term, true);
        if (!wd.seqs_ok) throw ToolkitError(wd.seqs_error);
        rec.predicted.resize(wd.seqs.test.samples);
        for (std::size_t i = 0; i < rec.predicted.size(); ++i)
            rec.predicted[i] = predict_nn(m, wd.seqs.test.sample(i));
        rec.actual = wd.seqs.test.y;
        impute_nonfinite(rec.predicted, wd.train_target_mean);
    } else {
        throw BadModelFile(model_file + ": unrecognized model format");
    }
    rec.metrics = metric_pair(rec.actual, rec.predicted);

    std::filesystem::create_directories(local.out_dir);
    const std::string pred_path = local.out_dir + "/" + predictions_filename(rec);
    write_text(pred_path, render_predictions_csv(rec));
    std::printf("predictions: %s\n", pred_path.c_str());
    std::printf("MAE %.17g RMSE %.17g\n", rec.metrics.mae, rec.metrics.rmse);
    return kOk;
}

int cmd_report(const std::string& records_path, const std::string& out_dir) {
    std::ifstream in(records_path, std::ios::binary);
    if (!in) throw FileNotFound(records_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const BenchmarkReport report = parse_records_csv(buf.str());
    std::filesystem::create_directories(out_dir);
    const std::string path = out_dir + "/report.md";
    write_text(path, render_report_md(report));
    std::printf("wrote %s (%zu records)\n", path.c_str(), report.records.size());
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"loadcast: multivariate electricity-load forecasting toolkit"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("generate", "write a deterministic synthetic CSV");
    std::size_t gen_days = 183;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "synthetic.csv";
    gen->add_option("--days", gen_days, "days of data (1440 rows each)");
    gen->add_option("--seed", gen_seed, "generation seed");
    gen->add_option("--out", gen_out, "output CSV path");

    auto* bench = app.add_subcommand("benchmark", "run the model x term x window protocol");
    SharedFlags bench_flags;
    add_shared_flags(bench, bench_flags);

    auto* train = app.add_subcommand("train", "train one model on one sampled window");
    SharedFlags train_flags;
    std::string train_model, train_term;
    add_shared_flags(train, train_flags);
    train->add_option("--model", train_model, "svr, sbc (frbs), or brnn")->required();
    train->add_option("--term", train_term, "vstelf, stelf, or mtelf")->required();

    auto* predict = app.add_subcommand("predict", "predict a window with a saved model");
    SharedFlags predict_flags;
    std::string predict_file, predict_term;
    add_shared_flags(predict, predict_flags);
    predict->add_option("--model-file", predict_file, "serialized model path")->required();
    predict->add_option("--term", predict_term, "vstelf, stelf, or mtelf")->required();

    auto* report = app.add_subcommand("report", "re-render report.md from a records CSV");
    std::string report_records, report_out = ".";
    report->add_option("--records", report_records, "records.csv path")->required();
    report->add_option("--out", report_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (gen->parsed()) return cmd_generate(gen_days, gen_seed, gen_out);
        if (bench->parsed()) return cmd_benchmark(build_config(bench, bench_flags));
        if (train->parsed())
            return cmd_train(build_config(train, train_flags),
                             model_kind_from_name(train_model), term_from_name(train_term));
        if (predict->parsed())
            return cmd_predict(build_config(predict, predict_flags), predict_file,
                               term_from_name(predict_term));
        if (report->parsed()) return cmd_report(report_records, report_out);
    } catch (const ToolkitError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfigError;
    }
    return kConfigError; // unreachable with require_subcommand(1)
}
