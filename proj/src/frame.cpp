#include "loadcast/frame.hpp"

#include <algorithm>
#include <cstdio>

namespace loadcast {

ColumnSchema ColumnSchema::house_power() {
    ColumnSchema s;
    s.inputs = {
        {"temp_out_c", "degC"},   {"humidity_pct", "%"},  {"light_living_w", "W"},
        {"light_kitchen_w", "W"}, {"washer_w", "W"},      {"fridge_w", "W"},
        {"microwave_w", "W"},     {"fans_w", "W"},
    };
    s.target = {"total_w", "W"};
    return s;
}

TimeSeriesFrame TimeSeriesFrame::create(std::vector<std::int64_t> timestamps_min,
                                        std::vector<Column> columns,
                                        std::string target_name,
                                        std::int64_t nominal_step_minutes) {
    TimeSeriesFrame f;
    f.timestamps_ = std::move(timestamps_min);
    f.columns_ = std::move(columns);
    f.target_name_ = std::move(target_name);
    f.step_minutes_ = nominal_step_minutes;

    const std::size_t n = f.timestamps_.size();
    for (const auto& c : f.columns_) {
        if (c.values.size() != n)
            throw SchemaMismatch("column " + c.name + " has " + std::to_string(c.values.size()) +
                                 " values for " + std::to_string(n) + " timestamps");
    }

    std::size_t target_hits = 0;
    for (const auto& c : f.columns_)
        if (c.name == f.target_name_) ++target_hits;
    if (target_hits != 1)
        throw SchemaMismatch("target column " + f.target_name_ + " matched " +
                             std::to_string(target_hits) + " columns");

    if (n >= 2) {
        // the observed grid wins over the caller's nominal step
        const std::int64_t step = f.timestamps_[1] - f.timestamps_[0];
        if (step <= 0) throw NonMonotonicTimestamp(1);
        for (std::size_t i = 1; i < n; ++i) {
            const std::int64_t d = f.timestamps_[i] - f.timestamps_[i - 1];
            if (d <= 0) throw NonMonotonicTimestamp(i);
            if (d != step) throw NonUniformStep(i);
        }
        f.step_minutes_ = step;
    }
    return f;
}

const Column& TimeSeriesFrame::column(const std::string& name) const {
    for (const auto& c : columns_)
        if (c.name == name) return c;
    throw MissingColumn(name);
}

bool TimeSeriesFrame::has_column(const std::string& name) const {
    return std::any_of(columns_.begin(), columns_.end(),
                       [&](const Column& c) { return c.name == name; });
}

std::vector<std::string> TimeSeriesFrame::input_names() const {
    std::vector<std::string> out;
    out.reserve(columns_.size());
    for (const auto& c : columns_)
        if (c.name != target_name_) out.push_back(c.name);
    return out;
}

TimeSeriesFrame TimeSeriesFrame::slice(std::size_t begin, std::size_t count) const {
    if (begin + count > size())
        throw FrameTooShort("slice [" + std::to_string(begin) + ", " +
                            std::to_string(begin + count) + ") exceeds " +
                            std::to_string(size()) + " rows");
    std::vector<std::int64_t> ts(timestamps_.begin() + begin, timestamps_.begin() + begin + count);
    std::vector<Column> cols;
    cols.reserve(columns_.size());
    for (const auto& c : columns_) {
        cols.push_back({c.name,
                        std::vector<double>(c.values.begin() + begin,
                                            c.values.begin() + begin + count),
                        c.unit});
    }
    return create(std::move(ts), std::move(cols), target_name_, step_minutes_);
}

TimeSeriesFrame TimeSeriesFrame::without_columns(const std::vector<std::string>& names) const {
    for (const auto& n : names)
        if (n == target_name_) throw SchemaMismatch("cannot drop target column " + n);
    std::vector<Column> kept;
    kept.reserve(columns_.size());
    for (const auto& c : columns_) {
        if (std::find(names.begin(), names.end(), c.name) == names.end()) kept.push_back(c);
    }
    return create(timestamps_, std::move(kept), target_name_, step_minutes_);
}

// ---- timestamps ----
// Civil-date conversion after Howard Hinnant's algorithms; no <chrono>
// calendar use so minute arithmetic stays plain integer math.

namespace {

std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

} // namespace

std::string format_timestamp(std::int64_t minutes) {
    std::int64_t days = minutes / 1440;
    std::int64_t rem = minutes % 1440;
    if (rem < 0) {
        rem += 1440;
        days -= 1;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:00", y, m, d,
                  static_cast<int>(rem / 60), static_cast<int>(rem % 60));
    return buf;
}

bool parse_timestamp(const std::string& text, std::int64_t& minutes_out) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    char sep = 0;
    int n = std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &s);
    if (n < 6 || (sep != 'T' && sep != ' ')) return false;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59) return false;
    if (n == 7 && s != 0) return false;  // minute grid only
    minutes_out = days_from_civil(y, mo, d) * 1440 + h * 60 + mi;
    return true;
}

} // namespace loadcast
