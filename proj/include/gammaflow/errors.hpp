#pragma once

#include <stdexcept>
#include <string>

namespace gammaflow {

/// Malformed or out-of-range arguments (shape mismatch, bad time, bad config value).
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A norm evaluator was asked for a target space it does not handle.
class UnsupportedMethod : public std::logic_error {
public:
    explicit UnsupportedMethod(const std::string& what) : std::logic_error(what) {}
};

/// Exhaustive enumeration would exceed the configured size budget.
class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gammaflow
