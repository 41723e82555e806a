#include "loadcast/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "loadcast/rng.hpp"

namespace loadcast {

const NormalizationMap::Entry& NormalizationMap::entry(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return e;
    throw MissingColumn(name);
}

bool NormalizationMap::has(const std::string& name) const {
    return std::any_of(entries.begin(), entries.end(),
                       [&](const Entry& e) { return e.name == name; });
}

const char* term_name(Term t) {
    switch (t) {
        case Term::VSTELF: return "VSTELF";
        case Term::STELF: return "STELF";
        case Term::MTELF: return "MTELF";
    }
    return "?";
}

Term term_from_name(const std::string& name) {
    std::string low = name;
    for (char& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (low == "vstelf") return Term::VSTELF;
    if (low == "stelf") return Term::STELF;
    if (low == "mtelf") return Term::MTELF;
    throw TypeMismatch("terms", "unknown term '" + name + "'");
}

TermConfig TermConfig::defaults(Term t) {
    TermConfig c;
    c.term = t;
    switch (t) {
        case Term::VSTELF:
            c.sampling_minutes = 1;
            c.train_len = 60;
            c.test_len = 10;
            break;
        case Term::STELF:
            c.sampling_minutes = 1;
            c.train_len = 3000;
            c.test_len = 3000;
            break;
        case Term::MTELF:
            c.sampling_minutes = 10;
            c.train_len = 4000;
            c.test_len = 4000;
            break;
    }
    c.verification_len = c.train_len / 2;
    c.window_count = 10;
    return c;
}

TimeSeriesFrame resample_mean(const TimeSeriesFrame& frame, std::int64_t period_minutes) {
    const std::int64_t step = frame.step_minutes();
    if (period_minutes < step || period_minutes % step != 0)
        throw IncompatiblePeriod("period " + std::to_string(period_minutes) +
                                 " min does not align with step " + std::to_string(step) + " min");
    const std::size_t block = static_cast<std::size_t>(period_minutes / step);
    const std::size_t out_rows = frame.size() / block;

    std::vector<std::int64_t> ts(out_rows);
    for (std::size_t i = 0; i < out_rows; ++i) ts[i] = frame.timestamps()[i * block];

    std::vector<Column> cols;
    cols.reserve(frame.column_count());
    for (const auto& c : frame.columns()) {
        std::vector<double> v(out_rows);
        for (std::size_t i = 0; i < out_rows; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < block; ++j) sum += c.values[i * block + j];
            v[i] = sum / static_cast<double>(block);
        }
        cols.push_back({c.name, std::move(v), c.unit});
    }
    return TimeSeriesFrame::create(std::move(ts), std::move(cols), frame.target_name(),
                                   period_minutes);
}

std::pair<TimeSeriesFrame, std::vector<std::string>> drop_zero_columns(
    const TimeSeriesFrame& frame) {
    std::vector<std::string> dropped;
    for (const auto& c : frame.columns()) {
        if (c.name == frame.target_name()) continue;
        const bool all_zero =
            std::all_of(c.values.begin(), c.values.end(), [](double v) { return v == 0.0; });
        if (all_zero && !c.values.empty()) dropped.push_back(c.name);
    }
    if (dropped.size() == frame.input_count()) throw AllInputsDropped();
    if (dropped.empty()) return {frame, {}};
    return {frame.without_columns(dropped), dropped};
}

NormalizationMap fit_minmax(const TimeSeriesFrame& frame) {
    if (frame.empty()) throw EmptyFrame();
    NormalizationMap map;
    map.entries.reserve(frame.column_count());
    for (const auto& c : frame.columns()) {
        const auto [lo, hi] = std::minmax_element(c.values.begin(), c.values.end());
        map.entries.push_back({c.name, *lo, *hi, *lo == *hi});
    }
    return map;
}

TimeSeriesFrame apply_minmax(const TimeSeriesFrame& frame, const NormalizationMap& map) {
    if (map.entries.size() != frame.column_count())
        throw SchemaMismatch("normalization map covers " + std::to_string(map.entries.size()) +
                             " columns, frame has " + std::to_string(frame.column_count()));
    std::vector<Column> cols;
    cols.reserve(frame.column_count());
    for (const auto& c : frame.columns()) {
        if (!map.has(c.name)) throw SchemaMismatch("no normalization entry for column " + c.name);
        const auto& e = map.entry(c.name);
        std::vector<double> v(c.values.size());
        if (e.degenerate) {
            std::fill(v.begin(), v.end(), 0.5);
        } else {
            const double span = e.max - e.min;
            for (std::size_t i = 0; i < c.values.size(); ++i) {
                const double u = (c.values[i] - e.min) / span;
                v[i] = std::clamp(u, 0.0, 1.0);
            }
        }
        cols.push_back({c.name, std::move(v), "norm"});
    }
    return TimeSeriesFrame::create(frame.timestamps(), std::move(cols), frame.target_name(),
                                   frame.step_minutes());
}

std::vector<double> invert_minmax(const std::vector<double>& values, const std::string& column,
                                  const NormalizationMap& map) {
    const auto& e = map.entry(column);
    if (e.degenerate) throw DegenerateColumn(column);
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = e.min + values[i] * (e.max - e.min);
    return out;
}

std::vector<std::pair<TimeSeriesFrame, TimeSeriesFrame>> sample_windows(
    const TimeSeriesFrame& frame, const TermConfig& cfg, std::uint64_t seed) {
    if (frame.step_minutes() != cfg.sampling_minutes)
        throw IncompatiblePeriod("frame step " + std::to_string(frame.step_minutes()) +
                                 " min, term expects " + std::to_string(cfg.sampling_minutes) +
                                 " min; resample first");
    const std::size_t need = cfg.train_len + cfg.test_len;
    if (frame.size() < need)
        throw FrameTooShort("need " + std::to_string(need) + " rows, frame has " +
                            std::to_string(frame.size()));
    const std::uint64_t max_offset = frame.size() - need;

    const Rng root(seed);
    std::vector<std::pair<TimeSeriesFrame, TimeSeriesFrame>> windows;
    windows.reserve(cfg.window_count);
    for (std::size_t k = 0; k < cfg.window_count; ++k) {
        Rng wrng = root.stream(k);
        const std::size_t offset = static_cast<std::size_t>(wrng.next_below(max_offset + 1));
        windows.emplace_back(frame.slice(offset, cfg.train_len),
                             frame.slice(offset + cfg.train_len, cfg.test_len));
    }
    return windows;
}

namespace {

SupervisedSet supervise(const TimeSeriesFrame& frame, std::size_t horizon) {
    if (frame.size() <= horizon)
        throw TooShortForHorizon("horizon " + std::to_string(horizon) + " needs more than " +
                                 std::to_string(frame.size()) + " rows");
    const auto names = frame.input_names();
    const std::size_t n = frame.size() - horizon;

    SupervisedSet s;
    s.horizon = horizon;
    s.attribute_names = names;
    s.X = Matrix(n, names.size());
    s.y.resize(n);
    const auto& target = frame.target().values;
    for (std::size_t a = 0; a < names.size(); ++a) {
        const auto& col = frame.column(names[a]).values;
        for (std::size_t t = 0; t < n; ++t) s.X.at(t, a) = col[t];
    }
    for (std::size_t t = 0; t < n; ++t) s.y[t] = target[t + horizon];
    return s;
}

} // namespace

std::pair<SupervisedSet, SupervisedSet> make_supervised(const TimeSeriesFrame& train,
                                                        const TimeSeriesFrame& test,
                                                        std::size_t horizon) {
    if (horizon < 1) throw ToolkitError("horizon must be >= 1");
    return {supervise(train, horizon), supervise(test, horizon)};
}

SequenceSplits make_sequences(const TimeSeriesFrame& train, const TimeSeriesFrame& test,
                              std::size_t lookback, std::size_t horizon,
                              double verification_fraction) {
    if (lookback < 1) throw ToolkitError("lookback must be >= 1");
    if (horizon < 1) throw ToolkitError("horizon must be >= 1");
    if (verification_fraction < 0.0 || verification_fraction > 1.0)
        throw ToolkitError("verification_fraction must lie in [0, 1]");
    if (train.size() < lookback + horizon)
        throw TooShortForLookback("lookback " + std::to_string(lookback) + " + horizon " +
                                  std::to_string(horizon) + " exceeds train rows " +
                                  std::to_string(train.size()));
    if (test.size() <= horizon)
        throw TooShortForHorizon("test split of " + std::to_string(test.size()) +
                                 " rows leaves no labelled sample");

    const auto names = train.input_names();
    if (test.input_names() != names)
        throw SchemaMismatch("train and test column sets differ");
    const std::size_t attrs = names.size();
    const std::size_t train_rows = train.size();

    // Concatenated input matrix (train rows then test rows) and target.
    const std::size_t total_rows = train_rows + test.size();
    Matrix rows(total_rows, attrs);
    std::vector<double> target(total_rows);
    for (std::size_t a = 0; a < attrs; ++a) {
        const auto& tr = train.column(names[a]).values;
        const auto& te = test.column(names[a]).values;
        for (std::size_t t = 0; t < tr.size(); ++t) rows.at(t, a) = tr[t];
        for (std::size_t t = 0; t < te.size(); ++t) rows.at(train_rows + t, a) = te[t];
    }
    {
        const auto& tr = train.target().values;
        const auto& te = test.target().values;
        std::copy(tr.begin(), tr.end(), target.begin());
        std::copy(te.begin(), te.end(), target.begin() + train_rows);
    }

    auto build = [&](std::size_t first_end, std::size_t count) {
        SequenceSet s;
        s.samples = count;
        s.lookback = lookback;
        s.attributes = attrs;
        s.data.resize(count * lookback * attrs);
        s.y.resize(count);
        for (std::size_t k = 0; k < count; ++k) {
            const std::size_t end = first_end + k;  // sequence covers rows end-lookback+1 .. end
            for (std::size_t t = 0; t < lookback; ++t) {
                const auto src = rows.row(end - lookback + 1 + t);
                std::copy(src.begin(), src.end(), s.step(k, t).begin());
            }
            s.y[k] = target[end + horizon];
        }
        return s;
    };

    const std::size_t train_samples = train_rows - lookback - horizon + 1;
    SequenceSet all_train = build(lookback - 1, train_samples);

    const std::size_t n_verif = static_cast<std::size_t>(
        std::floor(static_cast<double>(train_samples) * verification_fraction + 0.5));
    const std::size_t n_fit = train_samples - n_verif;

    auto take = [&](const SequenceSet& src, std::size_t begin, std::size_t count) {
        SequenceSet s;
        s.samples = count;
        s.lookback = lookback;
        s.attributes = attrs;
        s.data.assign(src.data.begin() + begin * lookback * attrs,
                      src.data.begin() + (begin + count) * lookback * attrs);
        s.y.assign(src.y.begin() + begin, src.y.begin() + begin + count);
        return s;
    };

    SequenceSplits out;
    out.training = take(all_train, 0, n_fit);
    out.verification = take(all_train, n_fit, n_verif);
    // Test samples borrow the train tail as history: the first test sequence
    // ends on test row 0 and predicts test row `horizon`.
    out.test = build(train_rows, test.size() - horizon);
    return out;
}

} // namespace loadcast
