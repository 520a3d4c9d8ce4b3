#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace sirflock {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter set or input violates a documented invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A bound or closed form is undefined for the given parameters (e.g. kappa2 == 0).
class InvalidParameterError : public Error {
public:
    using Error::Error;
};

/// Two particles came closer than the collision tolerance.
class CollisionError : public Error {
public:
    CollisionError(std::size_t i, std::size_t j, double distance,
                   double time = std::numeric_limits<double>::quiet_NaN());

    std::size_t first() const noexcept { return first_; }
    std::size_t second() const noexcept { return second_; }
    double distance() const noexcept { return distance_; }
    /// NaN when raised outside of a time integration.
    double time() const noexcept { return time_; }

    CollisionError at_time(double t) const { return CollisionError(first_, second_, distance_, t); }

private:
    std::size_t first_;
    std::size_t second_;
    double distance_;
    double time_;
};

/// An epidemic state left the probability simplex by more than the drift tolerance.
class DriftError : public Error {
public:
    DriftError(std::size_t particle, double magnitude, double time);

    std::size_t particle() const noexcept { return particle_; }
    double magnitude() const noexcept { return magnitude_; }
    double time() const noexcept { return time_; }

private:
    std::size_t particle_;
    double magnitude_;
    double time_;
};

/// Malformed scenario text. Line numbers are 1-based; 0 means "not tied to a line".
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& message);

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A least-squares window has too few usable samples.
class DegenerateWindowError : public Error {
public:
    using Error::Error;
};

} // namespace sirflock
