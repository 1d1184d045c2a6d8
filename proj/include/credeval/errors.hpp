#pragma once

#include <stdexcept>
#include <string>

namespace credeval {

// Base for every error raised by the library. Subclasses name the failure
// category so callers (the CLI, the batch evaluator) can map them to exit
// codes and quarantine counters.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A documented precondition was not met by the caller.
class ContractViolation : public Error {
public:
    using Error::Error;
};

// A set function is missing values it needs (e.g. no entry for the full set).
class StructuralError : public Error {
public:
    using Error::Error;
};

// The input is well formed but carries no usable information
// (e.g. all masses clamp to zero).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// The requested computation exceeds a size cap.
class CapacityError : public Error {
public:
    using Error::Error;
};

// Interval constraints describe an empty credal set.
class InfeasibleInputError : public Error {
public:
    using Error::Error;
};

// Manifest, prediction or labels file could not be parsed or validated.
class LoadError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace credeval
