#pragma once

#include <stdexcept>
#include <string>

namespace freeprob {

/// Bad user input: malformed measure files, unknown generators, invalid parameters.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A computation exceeded a configured resource guard (degree bound, subset
/// explosion, partition size).
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure with a diagnostic: carries the accuracy actually reached.
class numerics_error : public std::runtime_error {
public:
    numerics_error(const std::string& msg, double achieved)
        : std::runtime_error(msg), achieved_tolerance(achieved) {}
    double achieved_tolerance;
};

} // namespace freeprob
