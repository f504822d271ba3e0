#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mmfuse {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class DuplicateError : public ParseError {
public:
    using ParseError::ParseError;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class AlignmentError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Ill-conditioned numerics, e.g. a singular covariance with ridge = 0.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// R-CCA on unequal dimensions without the reducing PCA model.
class MissingReductionError : public DimensionError {
public:
    using DimensionError::DimensionError;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class GridError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

/// Spearman over fewer than two values or a constant side.
class UndefinedCorrelation : public Error {
public:
    using Error::Error;
};

class NoResultError : public Error {
public:
    using Error::Error;
};

}  // namespace mmfuse
