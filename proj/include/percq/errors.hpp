#pragma once

#include <stdexcept>
#include <string>

namespace percq {

// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Request exceeds a computational budget (e.g. exact enumeration depth).
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Iteration did not reach its target; carries the last iterate.
class IterationLimitError : public std::runtime_error {
public:
    IterationLimitError(const std::string& what, double last_value, int iterations)
        : std::runtime_error(what), last_value_(last_value), iterations_(iterations) {}

    double last_value() const noexcept { return last_value_; }
    int iterations() const noexcept { return iterations_; }

private:
    double last_value_;
    int iterations_;
};

} // namespace percq
