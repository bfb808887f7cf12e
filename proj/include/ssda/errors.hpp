#pragma once

#include <stdexcept>
#include <string>

namespace ssda {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid argument or configuration (bad grid, bad rho, bad bounds, ...).
class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& msg) : Error(msg) {}
};

// A class has fewer observations than the estimator requires, or the
// number of classes does not match the operation.
class InsufficientClassDataError : public Error {
public:
    explicit InsufficientClassDataError(const std::string& msg) : Error(msg) {}
};

// The legacy mu_minus estimator has q = 0 for some feature: no negative-class
// point falls strictly inside the Winsorization band.
class LegacyDegenerateError : public Error {
public:
    explicit LegacyDegenerateError(const std::string& msg) : Error(msg) {}
};

// Matrix/model dimensions do not match.
class DimensionMismatchError : public Error {
public:
    explicit DimensionMismatchError(const std::string& msg) : Error(msg) {}
};

// (mu_plus - mu_minus)^T beta == 0: the intercept formula is undefined.
class DegenerateProjectionError : public Error {
public:
    explicit DegenerateProjectionError(const std::string& msg) : Error(msg) {}
};

// Coordinate descent hit the sweep cap without converging.
class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

// Stratified CV folds could not be built with both classes in every fold.
class FoldConstructionError : public Error {
public:
    explicit FoldConstructionError(const std::string& msg) : Error(msg) {}
};

// CSV ingestion failure; carries a 1-based line number.
class CsvParseError : public Error {
public:
    CsvParseError(const std::string& msg, long line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

// Model file could not be parsed or has an unsupported version.
class SerializationError : public Error {
public:
    explicit SerializationError(const std::string& msg) : Error(msg) {}
};

}  // namespace ssda
