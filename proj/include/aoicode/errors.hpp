#pragma once
// errors.hpp - exception types shared by every aoicode module

#include <stdexcept>
#include <string>

namespace aoicode {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidAlphabetError : public Error {
public:
    using Error::Error;
};

class AlignmentError : public Error {
public:
    using Error::Error;
};

// max_len too small for a complete code, or lengths violating Kraft.
class FeasibilityError : public Error {
public:
    using Error::Error;
};

class OracleTooLargeError : public Error {
public:
    using Error::Error;
};

// Queue load at or beyond 1. Carries the offending mean service length and
// the mean interarrival time so sweeps can report how far off they were.
class InstabilityError : public Error {
public:
    InstabilityError(double mean_len, double inv_q, const std::string& what)
        : Error(what), mean_len_(mean_len), inv_q_(inv_q) {}

    double mean_len() const noexcept { return mean_len_; }
    double inv_q() const noexcept { return inv_q_; }

private:
    double mean_len_;
    double inv_q_;
};

// Null-symbol probability 1 - q E[L] fell outside (0, 1).
class DegenerateLoadError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class EmptySampleError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace aoicode
