#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "loadcast/frame.hpp"
#include "loadcast/matrix.hpp"

namespace loadcast {

// Per-column min/max pairs enabling an exact inverse mapping.
struct NormalizationMap {
    struct Entry {
        std::string name;
        double min = 0.0;
        double max = 0.0;
        bool degenerate = false;  // min == max
    };
    std::vector<Entry> entries;

    const Entry& entry(const std::string& name) const;
    bool has(const std::string& name) const;
};

// Forecasting time terms and their data shapes.
enum class Term { VSTELF, STELF, MTELF };

const char* term_name(Term t);

// Case-insensitive inverse of term_name; throws TypeMismatch.
Term term_from_name(const std::string& name);

struct TermConfig {
    Term term = Term::VSTELF;
    std::int64_t sampling_minutes = 1;
    std::size_t train_len = 60;
    std::size_t verification_len = 30;  // recurrent models: carved out of train_len
    std::size_t test_len = 10;
    std::size_t window_count = 10;

    // The three benchmark shapes: VSTELF 1 min 60/10, STELF 1 min 3000/3000,
    // MTELF 10 min 4000/4000, all with 10 windows and a half-size
    // verification share for recurrent models.
    static TermConfig defaults(Term t);
};

// Flat feature matrix with an aligned target vector.
struct SupervisedSet {
    Matrix X;                                 // rows = samples, cols = input attributes
    std::vector<double> y;                    // y[t] = target at t + horizon
    std::size_t horizon = 1;
    std::vector<std::string> attribute_names; // aligned with X columns
};

// Sequence block for recurrent models: samples x lookback x attributes.
struct SequenceSet {
    std::size_t samples = 0;
    std::size_t lookback = 0;
    std::size_t attributes = 0;
    std::vector<double> data;  // flat, sample-major then time then attribute
    std::vector<double> y;

    std::span<const double> step(std::size_t sample, std::size_t t) const {
        return {data.data() + (sample * lookback + t) * attributes, attributes};
    }
    std::span<double> step(std::size_t sample, std::size_t t) {
        return {data.data() + (sample * lookback + t) * attributes, attributes};
    }
    // contiguous lookback x attributes block of one sample
    std::span<const double> sample(std::size_t s) const {
        return {data.data() + s * lookback * attributes, lookback * attributes};
    }
};

// Mean-aggregates consecutive blocks of period/step rows; the trailing
// partial block is dropped and output timestamps take block-start instants.
// Throws IncompatiblePeriod unless period is a multiple of the frame step.
TimeSeriesFrame resample_mean(const TimeSeriesFrame& frame, std::int64_t period_minutes);

// Removes every input column that is exactly zero throughout and reports the
// removed names. The target column is never dropped. Throws AllInputsDropped
// when nothing but the target would remain.
std::pair<TimeSeriesFrame, std::vector<std::string>> drop_zero_columns(
    const TimeSeriesFrame& frame);

// Records per-column extrema (target included) for [0,1] scaling.
NormalizationMap fit_minmax(const TimeSeriesFrame& frame);

// Linearly maps every column into [0,1] under `map`. Values outside the
// fitted range clamp to the interval; degenerate columns map to 0.5. The map
// must cover exactly the frame's columns (SchemaMismatch otherwise).
TimeSeriesFrame apply_minmax(const TimeSeriesFrame& frame, const NormalizationMap& map);

// Inverse of apply_minmax for one column: v -> min + v * (max - min).
// Throws DegenerateColumn when the fitted column was constant.
std::vector<double> invert_minmax(const std::vector<double>& values, const std::string& column,
                                  const NormalizationMap& map);

// Draws cfg.window_count contiguous train+test windows at uniformly random
// offsets (with replacement; windows may overlap). One derived stream per
// window index, so window k is the same for a given seed no matter how many
// windows are requested. The frame must already be at cfg.sampling_minutes.
std::vector<std::pair<TimeSeriesFrame, TimeSeriesFrame>> sample_windows(
    const TimeSeriesFrame& frame, const TermConfig& cfg, std::uint64_t seed);

// Row-feature view: X[t] = inputs at t, y[t] = target at t + horizon; the
// last `horizon` rows of each split are dropped. Normalization is expected
// to have been applied already.
std::pair<SupervisedSet, SupervisedSet> make_supervised(const TimeSeriesFrame& train,
                                                        const TimeSeriesFrame& test,
                                                        std::size_t horizon);

struct SequenceSplits {
    SequenceSet training;
    SequenceSet verification;
    SequenceSet test;
};

// Sequence view for recurrent models. Training-window samples end at rows
// lookback-1 .. train_len-1-horizon and are split into contiguous halves
// (verification_fraction at the tail) for early stopping. Test samples keep
// the train tail as warm history so every test row from `horizon` onward is
// predicted, matching the row-feature view's alignment.
SequenceSplits make_sequences(const TimeSeriesFrame& train, const TimeSeriesFrame& test,
                              std::size_t lookback, std::size_t horizon,
                              double verification_fraction = 0.5);

} // namespace loadcast
