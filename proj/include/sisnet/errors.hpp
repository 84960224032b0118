#pragma once

#include <stdexcept>
#include <string>

namespace sisnet {

/// Input violates an operation precondition (bad sizes, ranges, partitions).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A theorem/certificate was asked to run outside its stated hypotheses.
class PreconditionViolated : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An integrator or eigensolver failed (step underflow, simplex violation, ...).
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario document could not be parsed; carries the offending line.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

}  // namespace sisnet
