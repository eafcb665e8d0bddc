#pragma once

#include <stdexcept>
#include <string>

namespace drift_records {

/// Raised for arguments outside an operation's domain (n < 1, c <= 0 where
/// c > 0 is required, empty sequences, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Adaptive quadrature stopped before reaching the requested tolerance.
/// Carries the best estimate so callers can decide whether it is usable.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double best_estimate, double error_estimate)
        : std::runtime_error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double best_estimate_;
    double error_estimate_;
};

/// A ratio whose denominator is too small relative to its numerical error.
class IllConditionedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The finiteness test for c = 0, delta > 0 could neither confirm convergence
/// nor exceed the divergence cap.
class UndecidedError : public std::runtime_error {
public:
    UndecidedError(const std::string& what, double last_partial)
        : std::runtime_error(what), last_partial_(last_partial) {}

    double last_partial_integral() const noexcept { return last_partial_; }

private:
    double last_partial_;
};

}  // namespace drift_records
