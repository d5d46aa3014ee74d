#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xos {

// Base class for every error raised by the library.  Callers that do not
// care about the precise failure mode can catch this alone.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Vector or matrix dimensions do not agree with the owning system.
class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

// A matrix required to be strictly column substochastic is not.
class NotStrictlySubstochastic : public Error {
public:
    explicit NotStrictlySubstochastic(const std::string& what) : Error(what) {}
};

// Ownership validation failed for a system handed to a solver entry point.
class InvalidSystem : public Error {
public:
    explicit InvalidSystem(const std::string& what) : Error(what) {}
};

// The fixed point iteration exhausted its iteration budget.
class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, std::size_t iterations, double residual)
        : Error(what), iterations(iterations), residual(residual) {}

    std::size_t iterations;
    double residual;
};

// Leverage is undefined because no exogenous assets back the system.
class ZeroExogenousBase : public Error {
public:
    explicit ZeroExogenousBase(const std::string& what) : Error(what) {}
};

// Cross-ownership degree is undefined because total claims are zero.
class ZeroClaims : public Error {
public:
    explicit ZeroClaims(const std::string& what) : Error(what) {}
};

// Correlation matrix failed Cholesky factorization beyond the jitter policy.
class NonPSDCorrelation : public Error {
public:
    explicit NonPSDCorrelation(const std::string& what) : Error(what) {}
};

// Monte Carlo pricing requires the contractive assumption class.
class NonContractiveSystem : public Error {
public:
    explicit NonContractiveSystem(const std::string& what) : Error(what) {}
};

// Scenario file could not be parsed against the schema.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

} // namespace xos
