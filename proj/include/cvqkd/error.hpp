#pragma once

#include <stdexcept>
#include <string>

namespace cvqkd {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Operands live on incompatible truncated spaces.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Requested amplitude is too large for the Fock cutoff.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, double tail_mass)
        : Error(what), tail_mass_(tail_mass) {}
    double tail_mass() const noexcept { return tail_mass_; }

private:
    double tail_mass_;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// I_AB > I_AE cannot be met for any threshold.
class NoSolutionError : public Error {
public:
    using Error::Error;
};

// Threshold discards every event.
class DegenerateSelectionError : public Error {
public:
    using Error::Error;
};

// Malformed frame or a message that violates the protocol state machine.
class ProtocolError : public Error {
public:
    using Error::Error;
};

class TransportError : public Error {
public:
    using Error::Error;
};

// Invalid experiment configuration. `field` names the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace cvqkd
