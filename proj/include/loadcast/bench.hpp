#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "loadcast/errors.hpp"
#include "loadcast/frbs.hpp"
#include "loadcast/kernels.hpp"
#include "loadcast/metrics.hpp"
#include "loadcast/pipeline.hpp"
#include "loadcast/rnn.hpp"
#include "loadcast/svr.hpp"

namespace loadcast {

// The three contenders, in report row order.
enum class ModelKind { svr, sbc, brnn };

const char* model_kind_name(ModelKind m);                  // "SVR" / "SBC" / "BRNN"
ModelKind model_kind_from_name(const std::string& name);   // case-insensitive; TypeMismatch

// One (model, term, window) cell of the protocol.
struct RunRecord {
    ModelKind model = ModelKind::svr;
    Term term = Term::VSTELF;
    std::size_t run_index = 0; // 1-based
    std::size_t offset = 0;    // window start row within the resampled frame
    MetricPair metrics{};      // normalized units; NaN when failed
    double train_seconds = 0.0;
    double predict_seconds = 0.0;
    std::vector<std::string> dropped_columns;
    std::vector<std::string> flags; // e.g. "imputed:3", "error:<reason>"
    bool failed = false;
    std::vector<double> actual;    // normalized test targets (empty when failed)
    std::vector<double> predicted; // aligned with actual
};

struct CellMean {
    std::size_t count = 0; // successful runs aggregated into the means
    MetricPair metrics{};
    double train_seconds = 0.0;
    double predict_seconds = 0.0;
};

struct BenchmarkReport {
    std::vector<RunRecord> records; // sorted by (model, term, run)
    CellMean means[3][3];           // [model][term], arithmetic over successes
    std::uint64_t seed = 0;
    bool seed_known = true; // false when rebuilt from a records file
    std::string config_note; // one-line protocol snapshot for the report header
};

// Everything run_benchmark needs; defaults reproduce the full protocol
// (3 models x 3 terms x 10 windows, horizon 1).
struct BenchConfig {
    std::vector<ModelKind> models{ModelKind::svr, ModelKind::sbc, ModelKind::brnn};
    std::vector<Term> terms{Term::VSTELF, Term::STELF, Term::MTELF};
    std::size_t runs = 10; // windows per term
    std::size_t horizon = 1;
    std::uint64_t seed = 1; // master seed

    SvrHyperParams svr;
    KernelSpec kernel;
    SbcParams sbc;
    FcmParams fcm;
    TrainHyper nn; // nn.seed is ignored; cell seeds derive from the master
    std::size_t nn_hidden = 16;
    std::size_t nn_lookback = 10;

    TermConfig vstelf = TermConfig::defaults(Term::VSTELF);
    TermConfig stelf = TermConfig::defaults(Term::STELF);
    TermConfig mtelf = TermConfig::defaults(Term::MTELF);

    const TermConfig& term_config(Term t) const;
    TermConfig& term_config(Term t);
    void validate() const; // nonzero runs/horizon, distinct models/terms
};

// Wall-clock around a computation on the monotonic clock.
template <typename Fn>
auto time_run(Fn&& fn) {
    static_assert(!std::is_void_v<std::invoke_result_t<Fn&>>,
                  "time_run expects a value-returning thunk");
    const auto t0 = std::chrono::steady_clock::now();
    auto result = fn();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    return std::pair<std::invoke_result_t<Fn&>, double>{std::move(result), dt.count()};
}

// Replaces every non-finite entry in place; returns how many were hit.
std::size_t impute_nonfinite(std::vector<double>& values, double replacement);

// One window's model-ready material: zero columns dropped (detected on
// train, mirrored on test), min-max fit on train only, row features always,
// sequence views on request. Sequence-building failures are captured rather
// than thrown so that e.g. a lookback longer than the window fails only the
// recurrent model.
struct PreparedWindow {
    SupervisedSet sup_train, sup_test;
    SequenceSplits seqs;
    bool seqs_ok = false;
    std::string seqs_error;
    std::vector<std::string> dropped;
    double train_target_mean = 0.0; // imputation value for broken predictions
};

// Throws ToolkitError subtypes when even the row features cannot be built
// (e.g. every input column is zero).
PreparedWindow prepare_window(const TimeSeriesFrame& train_raw, const TimeSeriesFrame& test_raw,
                              const BenchConfig& cfg, const TermConfig& tc,
                              bool want_sequences);

// Seed derivations shared by the benchmark and the single-window
// train/predict paths so their window draws and results agree. The term
// seed feeds sample_windows; the cell seed (run is 1-based) feeds training.
std::uint64_t derive_term_seed(std::uint64_t master_seed, Term t);
std::uint64_t derive_cell_seed(std::uint64_t master_seed, Term t, std::size_t run);

// The full protocol: per term resample, draw windows, and per window drop
// zero columns (train-detected, mirrored on the test split), fit min-max on
// train only, build row/sequence views, then train and time every enabled
// model. Failures are recorded per run (flag "error:...") without aborting
// the rest; non-finite predictions are imputed with the training-target mean
// and flagged. Seeds derive from (master seed, term, run).
// Throws FrameTooShort/IncompatiblePeriod when the frame cannot host a term.
BenchmarkReport run_benchmark(const TimeSeriesFrame& frame, const BenchConfig& cfg);

// Markdown accuracy + timing tables (rows SVR, SBC, BRNN; columns VSTELF,
// STELF, MTELF; 4 significant digits; absent cells "n/a"). Throws EmptyReport.
struct ReportTables {
    std::string accuracy;
    std::string timing;
};
ReportTables summarize(const BenchmarkReport& report);

// Renderers are pure so byte-identity is testable without touching disk.
std::string render_report_md(const BenchmarkReport& report);
std::string render_records_csv(const BenchmarkReport& report);
std::string render_predictions_csv(const RunRecord& record);
std::string predictions_filename(const RunRecord& record);

// Inverse of render_records_csv, for re-rendering a report from a records
// file: rebuilds the records (prediction series are not stored in the CSV)
// and recomputes the means. Throws ParseError on malformed rows.
BenchmarkReport parse_records_csv(const std::string& csv);

// Writes report.md, records.csv and one predictions CSV per successful run
// into out_dir (created if missing).
void write_benchmark_outputs(const BenchmarkReport& report, const std::string& out_dir);

} // namespace loadcast
