#pragma once

#include <stdexcept>
#include <string>

namespace twistbound {

/// Invalid input that should have been caught before any computation
/// (bad polygon, out-of-range parameter, policy violation, ...).
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Query outside the mathematical domain of an operation
/// (branch inverse below the branch range, origin slice point, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

/// A numerical procedure failed to converge or exhausted its budget.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace twistbound
