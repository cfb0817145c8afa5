#pragma once

#include <stdexcept>
#include <string>

namespace srgcert {

/// Pole hit, singular block, or eigen-solver failure at a specific frequency.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double omega)
        : std::runtime_error(what + " (omega = " + std::to_string(omega) + " rad/s)"),
          omega_(omega) {}

    double omega() const noexcept { return omega_; }

private:
    double omega_;
};

/// Malformed or unknown configuration content.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace srgcert
