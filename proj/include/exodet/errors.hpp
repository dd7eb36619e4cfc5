#pragma once

#include <stdexcept>
#include <string>

namespace exodet {

// Caller passed arguments that violate a documented precondition.
struct ContractViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A formula left its real domain (log of a non-positive number, inverse
// hyperbolic function evaluated off its branch, recursion depth cap, ...).
struct DomainFailure : std::domain_error {
    using std::domain_error::domain_error;
};

// An adaptive numerical routine hit its work cap before reaching the
// requested tolerance.  Carries the last two estimates so the caller can
// judge how bad the situation is.
struct AccuracyFailure : std::runtime_error {
    AccuracyFailure(const std::string& what, double previous_estimate,
                    double last_estimate)
        : std::runtime_error(what),
          previous(previous_estimate),
          last(last_estimate) {}
    double previous;
    double last;
};

// Input data fails a physical validity check (non-symmetric covariance,
// symplectic eigenvalue below the vacuum floor, non-normalized state, ...).
struct ValidityFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A simulation record contains an outcome impossible under both hypotheses.
struct MalformedRecord : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace exodet
