#pragma once

#include <stdexcept>
#include <string>

namespace nbflow {

// Base class of everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid arguments: mismatched shapes, bad parameters, violated chart-state
// invariants.  CLI exit code 3.
struct DomainError : Error {
    using Error::Error;
};

// Combinatorial size guards (partition enumeration, Graf queries).
struct SizeLimitError : DomainError {
    using DomainError::DomainError;
};

// Exact particle coincidence where the potential is singular.
struct CollisionSingularityError : DomainError {
    using DomainError::DomainError;
};

// Evaluation outside the interior of the Hill region.
struct HillBoundaryError : DomainError {
    using DomainError::DomainError;
};

// Vanishing internal component: the polar decomposition does not exist.
struct DegeneratePolarError : DomainError {
    using DomainError::DomainError;
};

// Redundant inputs disagree (e.g. stated energy vs. actual energy).
struct ConsistencyError : DomainError {
    using DomainError::DomainError;
};

// Query too close to a singular locus to answer reliably.
struct ConditioningError : DomainError {
    using DomainError::DomainError;
};

// Adaptive integration failed; carries the failure point.  CLI exit code 4.
struct StiffnessError : Error {
    StiffnessError(const std::string& what, double tau_, double t_)
        : Error(what), tau(tau_), t(t_) {}
    double tau;
    double t;
};

// Text input (scenario files, partition strings) failed to parse.  CLI exit code 2.
struct ParseError : Error {
    using Error::Error;
};

}  // namespace nbflow
