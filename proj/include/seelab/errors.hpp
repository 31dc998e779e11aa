#pragma once

#include <stdexcept>
#include <string>

namespace seelab {

/// Violated precondition or hypothesis (bad exponent, empty mode set, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Overflow, non-convergence or a non-finite state during a computation.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace seelab
