#pragma once

#include <stdexcept>
#include <string>

namespace foilwind {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid or inconsistent geometry (overlapping rectangles, bad winding placement, ...).
class GeometryError : public Error {
public:
    using Error::Error;
};

// Requested mesh size cannot resolve the layout.
class ResolutionError : public Error {
public:
    using Error::Error;
};

// Malformed or unsupported mesh file content.
class FormatError : public Error {
public:
    using Error::Error;
};

// Physical group name without a region/boundary mapping.
class TaggingError : public Error {
public:
    using Error::Error;
};

// Argument outside the domain of a function (e.g. alpha outside the winding).
class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    explicit SolverError(const std::string& what, double residual = -1.0)
        : Error(what), residual_(residual) {}

    // Relative residual norm at failure; negative when not available.
    double residual() const { return residual_; }

private:
    double residual_;
};

}  // namespace foilwind
