#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nethawkes {

/// Malformed input file. Carries the 1-based line number of the offending row.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input that violates a domain constraint (event past the horizon, bad label).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Factorization failures and non-finite likelihoods.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A categorical draw or conjugate update with no probability mass to work with.
class DegenerateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Simulation exceeded its event cap, usually because the network is supercritical.
class ExplosionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nethawkes
