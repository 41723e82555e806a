#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace loadcast {

// Base class for every recoverable toolkit error.
class ToolkitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- data ingestion ----

class MissingColumn : public ToolkitError {
public:
    explicit MissingColumn(const std::string& name)
        : ToolkitError("missing column: " + name), column_(name) {}
    const std::string& column() const { return column_; }

private:
    std::string column_;
};

class NonMonotonicTimestamp : public ToolkitError {
public:
    explicit NonMonotonicTimestamp(std::size_t row)
        : ToolkitError("timestamp not strictly increasing at data row " + std::to_string(row)),
          row_(row) {}
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

// Timestamps increase but the spacing deviates from the nominal step.
class NonUniformStep : public ToolkitError {
public:
    explicit NonUniformStep(std::size_t row)
        : ToolkitError("timestamp gap at data row " + std::to_string(row)), row_(row) {}
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

class ParseError : public ToolkitError {
public:
    ParseError(std::size_t row, const std::string& col)
        : ToolkitError("unparseable value at data row " + std::to_string(row) +
                       ", column " + col),
          row_(row), column_(col) {}
    std::size_t row() const { return row_; }
    const std::string& column() const { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

class FileNotFound : public ToolkitError {
public:
    explicit FileNotFound(const std::string& path)
        : ToolkitError("file not found: " + path) {}
};

class IoError : public ToolkitError {
public:
    using ToolkitError::ToolkitError;
};

// ---- pipeline ----

class IncompatiblePeriod : public ToolkitError {
public:
    using ToolkitError::ToolkitError;
};

class AllInputsDropped : public ToolkitError {
public:
    AllInputsDropped() : ToolkitError("all input columns are zero; nothing left to model") {}
};

class EmptyFrame : public ToolkitError {
public:
    EmptyFrame() : ToolkitError("frame has no rows") {}
};

class SchemaMismatch : public ToolkitError {
public:
    using ToolkitError::ToolkitError;
};

class DegenerateColumn : public ToolkitError {
public:
    explicit DegenerateColumn(const std::string& name)
        : ToolkitError("column is constant, inverse map undefined: " + name) {}
};

class FrameTooShort : public ToolkitError {
public:
    using ToolkitError::ToolkitError;
};

class TooShortForHorizon : public ToolkitError {
public:
    using ToolkitError::ToolkitError;
};

class TooShortForLookback : public ToolkitError {
public:
    using ToolkitError::ToolkitError;
};

// ---- models ----

class DimensionMismatch : public ToolkitError {
public:
    using ToolkitError::ToolkitError;
};

// A tensor argument (sequence block, parameter vector) has the wrong shape
// for the network architecture it is used with.
class ShapeMismatch : public ToolkitError {
public:
    using ToolkitError::ToolkitError;
};

class DegenerateData : public ToolkitError {
public:
    using ToolkitError::ToolkitError;
};

class NonFiniteValue : public ToolkitError {
public:
    using ToolkitError::ToolkitError;
};

class EmptyData : public ToolkitError {
public:
    EmptyData() : ToolkitError("empty data") {}
};

class FewerPointsThanClusters : public ToolkitError {
public:
    using ToolkitError::ToolkitError;
};

class EmptyBatch : public ToolkitError {
public:
    EmptyBatch() : ToolkitError("empty batch") {}
};

class EmptySet : public ToolkitError {
public:
    using ToolkitError::ToolkitError;
};

class BadModelFile : public ToolkitError {
public:
    using ToolkitError::ToolkitError;
};

// ---- metrics / reporting ----

class LengthMismatch : public ToolkitError {
public:
    using ToolkitError::ToolkitError;
};

class EmptyInput : public ToolkitError {
public:
    EmptyInput() : ToolkitError("empty input vector") {}
};

class EmptyReport : public ToolkitError {
public:
    EmptyReport() : ToolkitError("benchmark report holds no records") {}
};

// ---- configuration ----

class UnknownKey : public ToolkitError {
public:
    explicit UnknownKey(const std::string& key)
        : ToolkitError("unknown config key: " + key), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

class TypeMismatch : public ToolkitError {
public:
    explicit TypeMismatch(const std::string& key, const std::string& why)
        : ToolkitError("bad value for config key " + key + ": " + why), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

} // namespace loadcast
