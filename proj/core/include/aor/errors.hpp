#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aor {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Operand shapes disagree (matmul, layer wiring, batch widths).
struct DimensionError : Error {
    using Error::Error;
};

// A value is outside its documented domain (labels, distributions, counts).
struct ValidationError : Error {
    using Error::Error;
};

// A configuration object violates its invariants.
struct ConfigError : Error {
    using Error::Error;
};

// An API was called out of protocol order or with mismatched state.
struct ContractError : Error {
    using Error::Error;
};

// A computation produced NaN/Inf or was handed a non-finite input.
struct NumericalError : Error {
    using Error::Error;
};

// Filesystem-level failure (open, read, write, create directory).
struct IoError : Error {
    using Error::Error;
};

// A statistic is undefined for the given input (constant vector, empty group).
struct DegenerateError : Error {
    using Error::Error;
};

// CSV ingestion failure; carries the 1-based line number (0 = whole file).
struct CsvError : Error {
    std::size_t line;
    CsvError(std::size_t line_, const std::string& msg)
        : Error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

// Checkpoint file failure with a machine-checkable kind.
struct CheckpointError : Error {
    enum class Kind { BadMagic, BadVersion, BadHeader, ShapeMismatch, Truncated };
    Kind kind;
    CheckpointError(Kind kind_, const std::string& msg) : Error(msg), kind(kind_) {}
};

} // namespace aor
