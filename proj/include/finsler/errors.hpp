#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace finsler {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input (metric text, config, CLI arguments). Maps to exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

class SyntaxError : public InputError {
public:
    SyntaxError(std::size_t line, std::size_t column, std::string found,
                std::vector<std::string> expected);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::vector<std::string> expected_;
};

class UnknownSymbol : public InputError {
public:
    UnknownSymbol(std::size_t line, std::size_t column, const std::string& name);
};

class DimensionMismatch : public InputError {
public:
    DimensionMismatch(std::size_t line, std::size_t column, const std::string& what);
};

/// Numerical failures. Map to exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

class EvaluationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class OrderOverflow : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateMetric : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DomainExhausted : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DimensionTooSmall : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace finsler
