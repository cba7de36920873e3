#ifndef RELFACTS_ERRORS_HPP
#define RELFACTS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace relfacts {

// Common base so callers can catch every library failure in one handler.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller passed structurally invalid arguments: wrong dimensions, unknown
// labels, mismatched registries, bad component counts.
class UsageError : public Error {
public:
    using Error::Error;
};

// An operation would exceed a configured size ceiling.
class SizingError : public Error {
public:
    using Error::Error;
};

// A value violates one of its declared invariants (non-Hermitian observable,
// non-orthogonal partition, broken state normalization).
class ContractViolation : public Error {
public:
    using Error::Error;
};

// An operation's physical precondition does not hold (apparatus not in the
// ready state, observer already interacted).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Every outcome probability is numerically zero.
class DegenerateMeasurement : public Error {
public:
    using Error::Error;
};

// A configured object is missing something a step requires, e.g. a pointer
// observable without the outcome label being checked.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace relfacts

#endif
