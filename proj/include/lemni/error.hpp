#pragma once

#include <stdexcept>
#include <string>

namespace lemni {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An ensemble description that violates its invariants.
class InvalidSpec : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Vanishing leading coefficient; the caller must resample or reduce the degree.
class DegeneratePolynomial : public Error {
public:
    using Error::Error;
};

/// Non-finite intermediate value or a solver that failed to converge.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace lemni
