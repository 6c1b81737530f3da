#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace infoextract {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

/// Violated precondition or malformed caller input.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A configured resource cap (tensor size, memory) would be exceeded.
class CapacityExceeded : public Error {
public:
    using Error::Error;
};

/// A numerical routine failed to produce a finite, usable result.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

/// Structurally broken input file (ragged rows, bad header).
class FormatError : public Error {
public:
    using Error::Error;
};

/// A cell or token could not be parsed; carries its 1-based location.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error(message), line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Requested operation is outside the implemented scope.
class Unsupported : public Error {
public:
    using Error::Error;
};

/// Output file exists and overwriting was not requested.
class RefusedOverwrite : public Error {
public:
    using Error::Error;
};

}  // namespace infoextract
