// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace sis {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Model parameters violate their invariants (caller misuse).
class InvalidParams : public Error {
public:
    using Error::Error;
};

/// A state left the open interval (0, N) where the transform is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A quantity exceeded the representable double range.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// A stored Brownian grid would exceed the configured memory budget.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Requested a coarse level finer than the stored one.
class ExponentError : public Error {
public:
    using Error::Error;
};

/// Scheme or experiment configuration is inconsistent.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Extinction-threshold request does not match the parameter regime.
class RegimeError : public Error {
public:
    using Error::Error;
};

/// Least-squares fit with coincident abscissae.
class DegenerateFit : public Error {
public:
    using Error::Error;
};

/// Reading or writing an output file failed.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace sis
