#pragma once

#include <stdexcept>
#include <string>

namespace pflab {

/// Base class for all recoverable pflab errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Argument outside an operation's admissible range (s >= s_limit, u > 0, alpha <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Boundary curve fails the strict-convexity requirement (kappa <= 0 somewhere).
class ConvexityError : public Error {
public:
    using Error::Error;
};

/// Grid construction impossible (spacing too coarse for the domain).
class GridError : public Error {
public:
    using Error::Error;
};

/// |grad u|^2 reached the admissible limit (Lorentzian spacelike condition).
/// Carries the location of the first violation: r for radial profiles,
/// (x, y) for 2D fields.
class SpacelikeViolation : public Error {
public:
    SpacelikeViolation(const std::string& what, double r)
        : Error(what), radius(r) {}
    SpacelikeViolation(const std::string& what, double px, double py)
        : Error(what), x(px), y(py) {}

    double radius = -1.0;
    double x = 0.0, y = 0.0;
};

/// Closed-form bound requested outside its validity region
/// (Lorentzian cubic: alpha > 2/(3*sqrt(3))).
class ValidityRegionError : public Error {
public:
    ValidityRegionError(const std::string& what, double a)
        : Error(what), alpha(a) {}
    double alpha;
};

/// Bad run configuration (unknown key, missing mode field, nonpositive tolerance).
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace pflab
