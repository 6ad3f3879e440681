#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dcs {

// Base of every error the library raises on bad input or violated preconditions.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaError : Error {
    using Error::Error;
};

struct UnguardedConstraint : Error {
    using Error::Error;
};

// Carries one witness cycle as attribute ids, first vertex repeated at the end.
struct CyclicConstraints : Error {
    std::vector<int> cycle;
    CyclicConstraints(std::vector<int> c, const std::string& msg) : Error(msg), cycle(std::move(c)) {}
};

struct TooLarge : Error {
    using Error::Error;
};

struct UncoveredAttribute : Error {
    using Error::Error;
};

struct LambdaViolation : Error {
    using Error::Error;
};

struct DegenerateSpec : Error {
    using Error::Error;
};

struct Infeasible : Error {
    using Error::Error;
};

struct Unbounded : Error {
    using Error::Error;
};

struct EmptyDenominator : Error {
    using Error::Error;
};

// Malformed files or command-line data.
struct InputError : Error {
    using Error::Error;
};

}  // namespace dcs
