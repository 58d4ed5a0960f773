#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ceh {

/// Base of every error raised by the library. Callers that only need a
/// message can catch this; the CLI maps the concrete types to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ingest
class MissingFile : public Error {
public:
    using Error::Error;
};
class SchemaViolation : public Error {
public:
    using Error::Error;
};
class InvariantViolation : public Error {
public:
    using Error::Error;
};
class SessionWindowError : public Error {
public:
    using Error::Error;
};
class CalendarMismatch : public Error {
public:
    using Error::Error;
};

// catalog
class ConfigError : public Error {
public:
    using Error::Error;
};
class InfeasibleSession : public Error {
public:
    using Error::Error;
};

// model
class InfeasibleInstance : public Error {
public:
    using Error::Error;
};
class ModelSizeError : public Error {
public:
    ModelSizeError(const std::string& what, std::size_t columns, std::size_t rows)
        : Error(what), columns_(columns), rows_(rows) {}
    std::size_t columns() const noexcept { return columns_; }
    std::size_t rows() const noexcept { return rows_; }

private:
    std::size_t columns_;
    std::size_t rows_;
};

// solve
class BackendUnavailable : public Error {
public:
    using Error::Error;
};
class NumericalFailure : public Error {
public:
    using Error::Error;
};
class EnumerationTooLarge : public Error {
public:
    EnumerationTooLarge(const std::string& what, double combinations)
        : Error(what), combinations_(combinations) {}
    /// Number of leaf assignments the enumeration would have to visit.
    double combinations() const noexcept { return combinations_; }

private:
    double combinations_;
};

// report
class ValidationFailure : public Error {
public:
    using Error::Error;
};
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace ceh
