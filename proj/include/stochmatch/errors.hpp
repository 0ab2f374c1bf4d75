#pragma once

#include <stdexcept>
#include <string>

namespace stochmatch {

// Input that violates a documented invariant (bad instance file values,
// out-of-range parameters, infeasible vectors, oversized oracle inputs, ...).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input text (instance files, generator specs).  Messages carry
// enough context to locate the offending token.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical machinery failed a self-check (quadrature disagreement, simplex
// iteration guard, ...).  Distinct from ValidationError so callers can map it
// to a different exit status.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stochmatch
