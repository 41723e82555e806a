#include "loadcast/bench.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "loadcast/rng.hpp"

namespace loadcast {

const char* model_kind_name(ModelKind m) {
    switch (m) {
        case ModelKind::svr: return "SVR";
        case ModelKind::sbc: return "SBC";
        case ModelKind::brnn: return "BRNN";
    }
    return "?";
}

ModelKind model_kind_from_name(const std::string& name) {
    std::string low = name;
    for (char& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (low == "svr") return ModelKind::svr;
    if (low == "sbc" || low == "frbs") return ModelKind::sbc;
    if (low == "brnn") return ModelKind::brnn;
    throw TypeMismatch("models", "unknown model '" + name + "'");
}

const TermConfig& BenchConfig::term_config(Term t) const {
    switch (t) {
        case Term::VSTELF: return vstelf;
        case Term::STELF: return stelf;
        case Term::MTELF: return mtelf;
    }
    return vstelf;
}

TermConfig& BenchConfig::term_config(Term t) {
    switch (t) {
        case Term::VSTELF: return vstelf;
        case Term::STELF: return stelf;
        case Term::MTELF: return mtelf;
    }
    return vstelf;
}

void BenchConfig::validate() const {
    if (runs == 0) throw ToolkitError("benchmark needs at least one window per term");
    if (horizon == 0) throw ToolkitError("forecast horizon must be at least 1");
    if (models.empty()) throw ToolkitError("no models enabled");
    if (terms.empty()) throw ToolkitError("no terms enabled");
    for (std::size_t i = 0; i < models.size(); ++i)
        for (std::size_t j = i + 1; j < models.size(); ++j)
            if (models[i] == models[j]) throw ToolkitError("duplicate model in config");
    for (std::size_t i = 0; i < terms.size(); ++i)
        for (std::size_t j = i + 1; j < terms.size(); ++j)
            if (terms[i] == terms[j]) throw ToolkitError("duplicate term in config");
    if (nn_hidden == 0) throw ToolkitError("nn.hidden must be at least 1");
    if (nn_lookback == 0) throw ToolkitError("nn.lookback must be at least 1");
    svr.validate();
    kernel.validate();
    sbc.validate();
    fcm.validate();
    nn.validate();
}

std::size_t impute_nonfinite(std::vector<double>& values, double replacement) {
    std::size_t n = 0;
    for (double& v : values)
        if (!std::isfinite(v)) {
            v = replacement;
            ++n;
        }
    return n;
}

namespace {

std::size_t model_idx(ModelKind m) { return static_cast<std::size_t>(m); }
std::size_t term_idx(Term t) { return static_cast<std::size_t>(t); }

const ModelKind kModelOrder[3] = {ModelKind::svr, ModelKind::sbc, ModelKind::brnn};
const Term kTermOrder[3] = {Term::VSTELF, Term::STELF, Term::MTELF};

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == ';' || c == '\n' || c == '\r') c = ' ';
    return s;
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

std::string coarse_time(double s) {
    if (s < 10.0) return "less than 10 sec";
    if (s < 60.0) return "less than 1 min";
    if (s < 5400.0) return "around " + fmt("%.0f", s / 60.0) + " min";
    return "around " + fmt("%.0f", s / 3600.0) + " hr";
}

std::string lowercase(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

void recompute_means(BenchmarkReport& rep) {
    for (const RunRecord& rec : rep.records) {
        if (rec.failed) continue;
        CellMean& cell = rep.means[model_idx(rec.model)][term_idx(rec.term)];
        cell.count += 1;
        cell.metrics.mae += rec.metrics.mae;
        cell.metrics.rmse += rec.metrics.rmse;
        cell.train_seconds += rec.train_seconds;
        cell.predict_seconds += rec.predict_seconds;
    }
    for (auto& row : rep.means)
        for (CellMean& cell : row)
            if (cell.count) {
                const double inv = 1.0 / static_cast<double>(cell.count);
                cell.metrics.mae *= inv;
                cell.metrics.rmse *= inv;
                cell.train_seconds *= inv;
                cell.predict_seconds *= inv;
            }
}

RunRecord failed_record(ModelKind m, Term t, std::size_t run, std::size_t offset,
                        const std::vector<std::string>& dropped, const std::string& why) {
    RunRecord rec;
    rec.model = m;
    rec.term = t;
    rec.run_index = run;
    rec.offset = offset;
    rec.dropped_columns = dropped;
    rec.failed = true;
    rec.flags.push_back("error:" + sanitize(why));
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rec.metrics = MetricPair{nan, nan};
    return rec;
}

} // namespace

PreparedWindow prepare_window(const TimeSeriesFrame& train_raw, const TimeSeriesFrame& test_raw,
                              const BenchConfig& cfg, const TermConfig& tc,
                              bool want_sequences) {
    PreparedWindow wd;
    auto [train_clean, dropped] = drop_zero_columns(train_raw);
    wd.dropped = std::move(dropped);
    const TimeSeriesFrame test_clean = test_raw.without_columns(wd.dropped);
    const NormalizationMap norm = fit_minmax(train_clean);
    const TimeSeriesFrame train_n = apply_minmax(train_clean, norm);
    const TimeSeriesFrame test_n = apply_minmax(test_clean, norm);
    auto sup = make_supervised(train_n, test_n, cfg.horizon);
    wd.sup_train = std::move(sup.first);
    wd.sup_test = std::move(sup.second);
    double mean = 0.0;
    for (double v : wd.sup_train.y) mean += v;
    wd.train_target_mean = mean / static_cast<double>(wd.sup_train.y.size());
    if (want_sequences) {
        try {
            const double vfrac = static_cast<double>(tc.verification_len) /
                                 static_cast<double>(tc.train_len);
            wd.seqs = make_sequences(train_n, test_n, cfg.nn_lookback, cfg.horizon, vfrac);
            wd.seqs_ok = true;
        } catch (const ToolkitError& e) {
            wd.seqs_error = e.what();
        }
    }
    return wd;
}

std::uint64_t derive_term_seed(std::uint64_t master_seed, Term t) {
    return Rng(master_seed).stream(term_idx(t)).next_u64();
}

std::uint64_t derive_cell_seed(std::uint64_t master_seed, Term t, std::size_t run) {
    return Rng(master_seed).stream(term_idx(t)).stream(run).next_u64();
}

BenchmarkReport run_benchmark(const TimeSeriesFrame& frame, const BenchConfig& cfg) {
    cfg.validate();
    const bool wants_brnn =
        std::find(cfg.models.begin(), cfg.models.end(), ModelKind::brnn) != cfg.models.end();

    BenchmarkReport rep;
    rep.seed = cfg.seed;
    {
        std::vector<std::string> ms, ts;
        for (ModelKind m : cfg.models) ms.push_back(model_kind_name(m));
        for (Term t : cfg.terms) ts.push_back(term_name(t));
        rep.config_note = "models " + join(ms, '+') + "; terms " + join(ts, '+') + "; " +
                          std::to_string(cfg.runs) + " windows per term; horizon " +
                          std::to_string(cfg.horizon);
    }

    for (Term t : cfg.terms) {
        TermConfig tc = cfg.term_config(t);
        tc.window_count = cfg.runs;
        const TimeSeriesFrame resampled = frame.step_minutes() == tc.sampling_minutes
                                              ? frame
                                              : resample_mean(frame, tc.sampling_minutes);
        const std::uint64_t term_seed = derive_term_seed(cfg.seed, t);
        const auto windows = sample_windows(resampled, tc, term_seed);

        for (std::size_t w = 0; w < windows.size(); ++w) {
            const std::size_t run = w + 1;
            const std::uint64_t cell_seed = derive_cell_seed(cfg.seed, t, run);
            const auto& [train_raw, test_raw] = windows[w];
            const std::size_t offset = static_cast<std::size_t>(
                (train_raw.timestamps().front() - resampled.timestamps().front()) /
                resampled.step_minutes());

            PreparedWindow wd;
            bool prep_ok = true;
            std::string prep_error;
            try {
                wd = prepare_window(train_raw, test_raw, cfg, tc, wants_brnn);
            } catch (const ToolkitError& e) {
                prep_ok = false;
                prep_error = e.what();
            }

            for (ModelKind m : cfg.models) {
                if (!prep_ok) {
                    rep.records.push_back(failed_record(m, t, run, offset, {}, prep_error));
                    continue;
                }
                if (m == ModelKind::brnn && !wd.seqs_ok) {
                    rep.records.push_back(
                        failed_record(m, t, run, offset, wd.dropped, wd.seqs_error));
                    continue;
                }
                RunRecord rec;
                rec.model = m;
                rec.term = t;
                rec.run_index = run;
                rec.offset = offset;
                rec.dropped_columns = wd.dropped;
                try {
                    if (m == ModelKind::svr) {
                        auto [model, ts] = time_run([&] {
                            return train_svr(wd.sup_train, cfg.svr, cfg.kernel, cell_seed);
                        });
                        rec.train_seconds = ts;
                        auto [pred, ps] = time_run([&] {
                            std::vector<double> out(wd.sup_test.X.rows);
                            for (std::size_t i = 0; i < out.size(); ++i)
                                out[i] = predict_svr(model, wd.sup_test.X.row(i));
                            return out;
                        });
                        rec.predict_seconds = ps;
                        rec.predicted = std::move(pred);
                        rec.actual = wd.sup_test.y;
                    } else if (m == ModelKind::sbc) {
                        auto [model, ts] = time_run(
                            [&] { return train_frbs(wd.sup_train, cfg.sbc, cfg.fcm); });
                        rec.train_seconds = ts;
                        auto [pred, ps] = time_run([&] {
                            std::vector<double> out(wd.sup_test.X.rows);
                            for (std::size_t i = 0; i < out.size(); ++i)
                                out[i] = predict_frbs(model, wd.sup_test.X.row(i));
                            return out;
                        });
                        rec.predict_seconds = ps;
                        rec.predicted = std::move(pred);
                        rec.actual = wd.sup_test.y;
                    } else {
                        NetworkArch arch;
                        arch.kind = NetKind::brnn;
                        arch.hidden = cfg.nn_hidden;
                        arch.lookback = cfg.nn_lookback;
                        arch.input_dim = wd.seqs.training.attributes;
                        TrainHyper hp = cfg.nn;
                        hp.seed = cell_seed;
                        auto [trained, ts] = time_run([&] {
                            return train_network(arch, wd.seqs.training, wd.seqs.verification,
                                                 hp);
                        });
                        rec.train_seconds = ts;
                        const NeuralModel& model = trained.first;
                        auto [pred, ps] = time_run([&] {
                            std::vector<double> out(wd.seqs.test.samples);
                            for (std::size_t i = 0; i < out.size(); ++i)
                                out[i] = predict_nn(model, wd.seqs.test.sample(i));
                            return out;
                        });
                        rec.predict_seconds = ps;
                        rec.predicted = std::move(pred);
                        rec.actual = wd.seqs.test.y;
                    }
                    const std::size_t imputed =
                        impute_nonfinite(rec.predicted, wd.train_target_mean);
                    if (imputed) rec.flags.push_back("imputed:" + std::to_string(imputed));
                    rec.metrics = metric_pair(rec.actual, rec.predicted);
                } catch (const ToolkitError& e) {
                    rec = failed_record(m, t, run, offset, wd.dropped, e.what());
                }
                rep.records.push_back(std::move(rec));
            }
        }
    }

    std::sort(rep.records.begin(), rep.records.end(),
              [](const RunRecord& a, const RunRecord& b) {
                  if (model_idx(a.model) != model_idx(b.model))
                      return model_idx(a.model) < model_idx(b.model);
                  if (term_idx(a.term) != term_idx(b.term))
                      return term_idx(a.term) < term_idx(b.term);
                  return a.run_index < b.run_index;
              });

    recompute_means(rep);
    return rep;
}

ReportTables summarize(const BenchmarkReport& report) {
    if (report.records.empty()) throw EmptyReport{};
    ReportTables out;
    const std::string head = "| Model | VSTELF | STELF | MTELF |\n| --- | --- | --- | --- |\n";
    out.accuracy = head;
    out.timing = head;
    for (ModelKind m : kModelOrder) {
        out.accuracy += "| ";
        out.accuracy += model_kind_name(m);
        out.timing += "| ";
        out.timing += model_kind_name(m);
        for (Term t : kTermOrder) {
            const CellMean& cell = report.means[model_idx(m)][term_idx(t)];
            if (cell.count == 0) {
                out.accuracy += " | n/a";
                out.timing += " | n/a";
                continue;
            }
            out.accuracy +=
                " | " + fmt("%.4g", cell.metrics.mae) + " / " + fmt("%.4g", cell.metrics.rmse);
            const double total = cell.train_seconds + cell.predict_seconds;
            out.timing += " | " + fmt("%.4g", cell.train_seconds) + " s + " +
                          fmt("%.4g", cell.predict_seconds) + " s = " + fmt("%.4g", total) +
                          " s (" + coarse_time(total) + ")";
        }
        out.accuracy += " |\n";
        out.timing += " |\n";
    }
    return out;
}

std::string render_report_md(const BenchmarkReport& report) {
    const ReportTables tables = summarize(report);
    std::string md = "# Load forecasting benchmark\n\n";
    md += report.seed_known ? "- seed: " + std::to_string(report.seed) + "\n"
                            : std::string("- seed: not recorded in the records file\n");
    md += "- protocol: " + report.config_note + "\n\n";
    md += "## Accuracy (normalized MAE / RMSE, mean over windows)\n\n";
    md += tables.accuracy;
    md += "\n## Execution time (mean train + predict per window)\n\n";
    md += tables.timing;
    return md;
}

std::string render_records_csv(const BenchmarkReport& report) {
    std::string csv = "model,term,run,offset,mae,rmse,train_s,predict_s,dropped,flags\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const RunRecord& r : report.records) {
        csv += model_kind_name(r.model);
        csv += ',';
        csv += term_name(r.term);
        csv += ',';
        csv += std::to_string(r.run_index);
        csv += ',';
        csv += std::to_string(r.offset);
        csv += ',';
        csv += num(r.metrics.mae);
        csv += ',';
        csv += num(r.metrics.rmse);
        csv += ',';
        csv += num(r.train_seconds);
        csv += ',';
        csv += num(r.predict_seconds);
        csv += ',';
        csv += join(r.dropped_columns, '|');
        csv += ',';
        csv += join(r.flags, ';');
        csv += '\n';
    }
    return csv;
}

BenchmarkReport parse_records_csv(const std::string& csv) {
    BenchmarkReport rep;
    rep.seed_known = false;
    rep.config_note = "rebuilt from a records file";

    std::size_t pos = 0, row = 0;
    auto next_line = [&](std::string& line) {
        if (pos >= csv.size()) return false;
        std::size_t end = csv.find('\n', pos);
        if (end == std::string::npos) end = csv.size();
        line = csv.substr(pos, end - pos);
        pos = end + 1;
        return true;
    };
    auto split = [](const std::string& s, char sep) {
        std::vector<std::string> out;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= s.size(); ++i)
            if (i == s.size() || s[i] == sep) {
                out.push_back(s.substr(start, i - start));
                start = i + 1;
            }
        return out;
    };

    std::string line;
    if (!next_line(line) ||
        line != "model,term,run,offset,mae,rmse,train_s,predict_s,dropped,flags")
        throw ParseError(0, "header");
    while (next_line(line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 10) throw ParseError(row, "record");
        RunRecord rec;
        try {
            rec.model = model_kind_from_name(fields[0]);
            rec.term = term_from_name(fields[1]);
        } catch (const ToolkitError&) {
            throw ParseError(row, "model/term");
        }
        try {
            rec.run_index = std::stoull(fields[2]);
            rec.offset = std::stoull(fields[3]);
            rec.metrics.mae = std::stod(fields[4]);
            rec.metrics.rmse = std::stod(fields[5]);
            rec.train_seconds = std::stod(fields[6]);
            rec.predict_seconds = std::stod(fields[7]);
        } catch (const std::exception&) {
            throw ParseError(row, "numeric field");
        }
        if (!fields[8].empty()) rec.dropped_columns = split(fields[8], '|');
        if (!fields[9].empty()) rec.flags = split(fields[9], ';');
        rec.failed = std::any_of(rec.flags.begin(), rec.flags.end(), [](const std::string& f) {
            return f.rfind("error:", 0) == 0;
        });
        rep.records.push_back(std::move(rec));
    }

    recompute_means(rep);
    return rep;
}

std::string render_predictions_csv(const RunRecord& record) {
    std::string csv = "t,actual,predicted\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (std::size_t i = 0; i < record.actual.size(); ++i) {
        csv += std::to_string(i);
        csv += ',';
        csv += num(record.actual[i]);
        csv += ',';
        csv += num(record.predicted[i]);
        csv += '\n';
    }
    return csv;
}

std::string predictions_filename(const RunRecord& record) {
    return "predictions_" + lowercase(model_kind_name(record.model)) + "_" +
           lowercase(term_name(record.term)) + "_" + std::to_string(record.run_index) + ".csv";
}

void write_benchmark_outputs(const BenchmarkReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

    auto write = [&](const std::string& name, const std::string& content) {
        const std::string path = out_dir + "/" + name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + path);
        out << content;
        if (!out) throw IoError("write failed: " + path);
    };
    write("report.md", render_report_md(report));
    write("records.csv", render_records_csv(report));
    for (const RunRecord& r : report.records)
        if (!r.failed) write(predictions_filename(r), render_predictions_csv(r));
}

} // namespace loadcast
