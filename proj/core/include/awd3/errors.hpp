#pragma once

#include <stdexcept>
#include <string>

namespace awd3 {

/// Inputs outside a function's numeric domain (non-positive sigma, |rho|>1, ...).
struct ParameterDomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Model collapsed to a single random variable (sigma_d == 0) where a
/// finite answer does not exist.
struct DegenerateModelError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Vector / matrix dimensions do not line up.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An environment was asked for something it cannot do (state injection).
struct CapabilityError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Inconsistent agent or run configuration.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed or unreadable artifact file (checkpoint, config).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace awd3
