#pragma once

#include <stdexcept>
#include <string>

namespace evoq {

// Precondition violated by an argument (probability out of range, size mismatch, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Invalid configuration value. `field()` names the offending key; the
// message reads "<field> <constraint>", e.g. "temperature must be > 0".
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& constraint)
        : std::invalid_argument(field + " " + constraint), field_(std::move(field)) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// A numerical procedure failed to reach its stopping criterion.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace evoq
