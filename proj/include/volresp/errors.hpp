#pragma once

#include <stdexcept>
#include <string>

namespace volresp {

// Rejected input data (non-positive price, malformed CSV row, ...).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Invalid parameters or configuration (window sizes, ODE coefficients, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A window reaches before the start or past the end of a series.
class OutOfRangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// A correlation window has zero variance in at least one series.
class DegenerateWindowError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Argument outside the mathematical domain of a transform.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Series, profiles or calendars that were expected to line up do not.
class AlignmentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A result that is impossible in exact arithmetic (negative variance sum,
// correlation far outside [-1, 1]). Indicates a bug, not bad input.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// A date range with nothing evaluable in it.
class EmptyResultError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace volresp
