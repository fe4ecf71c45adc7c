#pragma once

#include <stdexcept>
#include <string>

namespace hampath {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    /// Domain errors describe a mathematically ill-posed request (as opposed
    /// to malformed input); the CLI maps them to exit status 2.
    virtual bool is_domain_error() const noexcept { return false; }
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    GridMismatch() : Error("functions or operators live on different time grids") {}
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
    bool is_domain_error() const noexcept override { return true; }
};

/// cos(sqrt(k) t) vanishes (to 1e-8): the oscillator hits a caustic.
class SingularTime : public DomainError {
public:
    using DomainError::DomainError;
};

/// The pin matrix violates the admissibility condition of the Gauss kernel.
class PinDegenerate : public DomainError {
public:
    using DomainError::DomainError;
};

class DegenerateDeterminant : public DomainError {
public:
    using DomainError::DomainError;
};

class BranchCrossing : public DomainError {
public:
    using DomainError::DomainError;
};

class ContourDivergent : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace hampath
