#pragma once

#include <stdexcept>
#include <string>

namespace edcamap {

/// Input that makes one of the model equations undefined (e.g. p = 1 in the
/// backoff chain normalisation).
class DegenerateInputError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Fixed-point iteration ran out of budget.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// An access category with zero throughput: its access delay is unbounded.
class StarvedClassError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Argmax requested over an empty candidate set.
class EmptyDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Drop threshold that the blocking probability can never reach.
class ThresholdError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Problem size beyond what an enumeration routine accepts.
class SizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Not enough completed GOPs to report a statistic.
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace edcamap
