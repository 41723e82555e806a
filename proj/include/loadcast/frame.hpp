#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "loadcast/errors.hpp"

namespace loadcast {

// One named series of a frame. `unit` is carried for reporting only.
struct Column {
    std::string name;
    std::vector<double> values;
    std::string unit;
};

// Expected CSV layout: column names, units, and which column is the target.
struct ColumnSchema {
    struct Entry {
        std::string name;
        std::string unit;
    };
    std::vector<Entry> inputs;
    Entry target;

    // The house-consumption layout used throughout: outdoor temperature,
    // humidity, six device average powers, and the summed device power as
    // target. Eight inputs plus one target.
    static ColumnSchema house_power();
};

// Timestamped matrix of named attribute columns plus one target column.
//
// Invariants, enforced by the named constructors:
//   - every column has exactly as many values as there are timestamps,
//   - timestamps are strictly increasing on a uniform minute grid,
//   - target_name names exactly one column.
// Frames are immutable in spirit: operations return new frames.
class TimeSeriesFrame {
public:
    TimeSeriesFrame() = default;

    // Validates the invariants above; throws NonMonotonicTimestamp /
    // NonUniformStep / SchemaMismatch on violation. The nominal step is
    // inferred from the timestamps when there are two or more rows; the
    // explicit argument only matters for shorter frames (e.g. a one-row
    // resample result that still lives on a coarse grid).
    static TimeSeriesFrame create(std::vector<std::int64_t> timestamps_min,
                                  std::vector<Column> columns,
                                  std::string target_name,
                                  std::int64_t nominal_step_minutes = 1);

    std::size_t size() const { return timestamps_.size(); }
    bool empty() const { return timestamps_.empty(); }
    std::size_t column_count() const { return columns_.size(); }
    std::size_t input_count() const { return columns_.size() - 1; }

    // Nominal step in minutes; 1 for a single-row frame.
    std::int64_t step_minutes() const { return step_minutes_; }

    const std::vector<std::int64_t>& timestamps() const { return timestamps_; }
    const std::vector<Column>& columns() const { return columns_; }
    const std::string& target_name() const { return target_name_; }

    const Column& column(const std::string& name) const;
    const Column& target() const { return column(target_name_); }
    bool has_column(const std::string& name) const;

    // Names of every non-target column, in frame order.
    std::vector<std::string> input_names() const;

    // Contiguous row slice [begin, begin+count).
    TimeSeriesFrame slice(std::size_t begin, std::size_t count) const;

    // Copy without the named columns. Dropping the target throws.
    TimeSeriesFrame without_columns(const std::vector<std::string>& names) const;

private:
    std::vector<std::int64_t> timestamps_;  // minutes since epoch, local-naive
    std::vector<Column> columns_;
    std::string target_name_;
    std::int64_t step_minutes_ = 1;
};

// ---- timestamp text form ----
// ISO-8601 local-naive, minute resolution: "2020-10-01T00:01:00".
// Parsing also accepts a space separator and omitted seconds.

std::string format_timestamp(std::int64_t minutes_since_epoch);

// Returns false if the text does not parse.
bool parse_timestamp(const std::string& text, std::int64_t& minutes_out);

} // namespace loadcast
