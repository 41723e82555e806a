#pragma once

#include <string>

#include "loadcast/frame.hpp"

namespace loadcast {

// Reads a minute-grid CSV into a frame. The header must contain a
// `timestamp` column plus every schema column; extra columns are an error
// (they indicate a schema the toolkit does not understand). Column order in
// the file is free; the returned frame is ordered per schema. Throws
// FileNotFound, MissingColumn, ParseError (with 1-based data row numbers),
// NonMonotonicTimestamp, NonUniformStep.
TimeSeriesFrame load_csv(const std::string& path, const ColumnSchema& schema);

// Writes the frame in the same layout load_csv reads: a header of
// `timestamp` plus column names, ISO-8601 minute timestamps, and values
// formatted with "%.17g" so a round trip reproduces every double exactly.
void write_csv(const TimeSeriesFrame& frame, const std::string& path);

} // namespace loadcast
