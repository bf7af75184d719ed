#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fibstat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A horizon argument is below the minimum an operation accepts.
class InvalidHorizon : public Error {
public:
    using Error::Error;
};

/// A Fibonacci cache is too short for the requested sequence length.
class HorizonError : public Error {
public:
    using Error::Error;
};

/// Argument outside an operation's domain (unknown names, bad grid sizes, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Two index sets overlap where disjointness was required.
class OverlapError : public Error {
public:
    using Error::Error;
};

/// An operator family failed its positivity or linearity spot check.
class OperatorCheckError : public Error {
public:
    using Error::Error;
};

/// An exact identity failed. Carries the offending index.
class IntegrityError : public Error {
public:
    IntegrityError(const std::string& what, std::size_t index)
        : Error(what + " (n = " + std::to_string(index) + ")"), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Malformed experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace fibstat
