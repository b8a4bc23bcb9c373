#pragma once

#include <stdexcept>
#include <string>

namespace flowlab
{
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Malformed or out-of-contract argument.
    class InputError : public Error
    {
    public:
        using Error::Error;
    };

    /// Derivative density requested on the jump set.
    class SingularPointError : public Error
    {
    public:
        using Error::Error;
    };

    class PreconditionError : public Error
    {
    public:
        using Error::Error;
    };

    class DomainEscapeError : public Error
    {
    public:
        using Error::Error;
    };

    /// Lattice larger than the node budget.
    class CapacityError : public Error
    {
    public:
        using Error::Error;
    };

    class RangeError : public Error
    {
    public:
        using Error::Error;
    };

    /// Crossing with (almost) zero incoming normal flux.
    class DegenerateCrossingError : public Error
    {
    public:
        using Error::Error;
    };

    class CatalogError : public Error
    {
    public:
        using Error::Error;
    };

    class ConfigError : public Error
    {
    public:
        using Error::Error;
    };
} // namespace flowlab
