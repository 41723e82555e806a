#include "loadcast/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace loadcast {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(text.c_str(), &end);
    return end == text.c_str() + text.size() && errno == 0;
}

} // namespace

TimeSeriesFrame load_csv(const std::string& path, const ColumnSchema& schema) {
    std::ifstream in(path);
    if (!in) throw FileNotFound(path);

    std::string line;
    if (!std::getline(in, line)) throw ParseError(0, "header");
    const auto header = split_line(line);

    auto find_col = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw MissingColumn(name);
    };

    const std::size_t ts_idx = find_col("timestamp");
    std::vector<std::size_t> col_idx;
    std::vector<Column> columns;
    for (const auto& e : schema.inputs) {
        col_idx.push_back(find_col(e.name));
        columns.push_back({e.name, {}, e.unit});
    }
    col_idx.push_back(find_col(schema.target.name));
    columns.push_back({schema.target.name, {}, schema.target.unit});

    if (header.size() != schema.inputs.size() + 2)
        throw SchemaMismatch("expected " + std::to_string(schema.inputs.size() + 2) +
                             " columns, file has " + std::to_string(header.size()));

    std::vector<std::int64_t> timestamps;
    std::size_t row = 0;  // 1-based data row, header excluded
    std::int64_t prev_ts = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row;
        const auto fields = split_line(line);
        if (fields.size() != header.size()) throw ParseError(row, "row width");

        std::int64_t ts;
        if (!parse_timestamp(fields[ts_idx], ts)) throw ParseError(row, "timestamp");
        if (row > 1 && ts <= prev_ts) throw NonMonotonicTimestamp(row);
        prev_ts = ts;
        timestamps.push_back(ts);

        for (std::size_t c = 0; c < col_idx.size(); ++c) {
            double v;
            if (!parse_double(fields[col_idx[c]], v)) throw ParseError(row, columns[c].name);
            columns[c].values.push_back(v);
        }
    }

    try {
        return TimeSeriesFrame::create(std::move(timestamps), std::move(columns),
                                       schema.target.name);
    } catch (const NonUniformStep& e) {
        throw NonUniformStep(e.row());  // report with the CSV's row numbering
    }
}

void write_csv(const TimeSeriesFrame& frame, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);

    out << "timestamp";
    for (const auto& c : frame.columns()) out << ',' << c.name;
    out << '\n';

    char buf[32];
    for (std::size_t i = 0; i < frame.size(); ++i) {
        out << format_timestamp(frame.timestamps()[i]);
        for (const auto& c : frame.columns()) {
            std::snprintf(buf, sizeof(buf), "%.17g", c.values[i]);
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

} // namespace loadcast
