#pragma once

#include <stdexcept>
#include <string>

namespace kfp {

/// Requested accuracy could not be reached; carries the achieved error estimate.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, double achieved, double requested)
        : std::runtime_error(what + " (achieved " + std::to_string(achieved) +
                             ", requested " + std::to_string(requested) + ")"),
          achieved_error(achieved), requested_error(requested) {}

    double achieved_error;
    double requested_error;
};

/// Orthogonal-polynomial construction lost positivity; reports the failing
/// index and the largest basis size that is still usable.
class RecurrenceBreakdown : public std::runtime_error {
public:
    RecurrenceBreakdown(const std::string& what, int failing, int usable)
        : std::runtime_error(what + " at index " + std::to_string(failing) +
                             "; maximal usable N = " + std::to_string(usable)),
          failing_index(failing), max_usable(usable) {}

    int failing_index;
    int max_usable;
};

/// Invalid parameter/scheme combination detected at setup.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Linear solve failed its residual check or hit a zero pivot.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace kfp
