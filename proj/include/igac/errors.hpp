/**
 * @file errors.hpp
 * @brief Exception hierarchy shared by every igac module.
 *
 * Configuration problems derive from ConfigError; everything raised while
 * integrating or integrating-over derives from NumericalError. The CLI maps
 * the two families onto distinct exit codes.
 */
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace igac {

/// Base of all library errors. `kind()` is a stable machine-readable tag.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Bad call arguments (empty factor list, equal plane axes, too few samples).
class ArgumentError : public ConfigError {
public:
    explicit ArgumentError(const std::string& what) : ConfigError("argument", what) {}
};

class UnsupportedFamilyError : public ConfigError {
public:
    explicit UnsupportedFamilyError(const std::string& name)
        : ConfigError("unsupported_family", "unsupported family '" + name + "'") {}
};

/// A parameter lies outside the open parameter domain of its family.
class DomainError : public ConfigError {
public:
    explicit DomainError(const std::string& what) : ConfigError("domain", what) {}
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class SingularityError : public NumericalError {
public:
    explicit SingularityError(const std::string& what) : NumericalError("singularity", what) {}
};

/// Successive quadrature refinements failed to agree.
class OracleFailure : public NumericalError {
public:
    OracleFailure(const std::string& what, double previous, double current)
        : NumericalError("oracle_failure", what), previous_(previous), current_(current) {}
    [[nodiscard]] double previous() const noexcept { return previous_; }
    [[nodiscard]] double current() const noexcept { return current_; }

private:
    double previous_;
    double current_;
};

/// An accepted integration step left the open parameter domain.
class DomainExitError : public NumericalError {
public:
    DomainExitError(const std::string& what, double last_tau, std::vector<double> last_state)
        : NumericalError("domain_exit", what), last_tau_(last_tau), last_state_(std::move(last_state)) {}
    [[nodiscard]] double last_valid_tau() const noexcept { return last_tau_; }
    [[nodiscard]] const std::vector<double>& last_valid_state() const noexcept { return last_state_; }

private:
    double last_tau_;
    std::vector<double> last_state_;
};

/// Step size collapsed below the representable resolution of tau.
class StiffnessError : public NumericalError {
public:
    StiffnessError(const std::string& what, double tau, double step)
        : NumericalError("stiffness", what), tau_(tau), step_(step) {}
    [[nodiscard]] double tau() const noexcept { return tau_; }
    [[nodiscard]] double step() const noexcept { return step_; }

private:
    double tau_;
    double step_;
};

}  // namespace igac
