#pragma once

#include <stdexcept>
#include <string>

namespace muonlab {

// Base class for all library failures. Every throw site goes through one of
// the derived types below so callers can distinguish "you passed nonsense"
// from "the numerics went bad" without string matching.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Dimension mismatches and empty/oversized operands.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what) : Error(what) {}
};

// Invalid configuration or argument values (negative step counts, momentum
// outside [0,1), unknown mode names, and so on).
class ValueError : public Error {
public:
    explicit ValueError(const std::string& what) : Error(what) {}
};

// NaN/Inf encountered, or an operation that requires nonzero magnitude got a
// numerically zero input.
class NumericsError : public Error {
public:
    explicit NumericsError(const std::string& what) : Error(what) {}
};

// An iterative routine hit its sweep/step cap before meeting its tolerance.
class ConvergenceError : public NumericsError {
public:
    explicit ConvergenceError(const std::string& what) : NumericsError(what) {}
};

// Malformed external input: config files, CSV payloads, CLI argument values.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

// Training loss blew up or went non-finite; carries the step it happened at.
class DivergenceError : public NumericsError {
public:
    DivergenceError(const std::string& what, long step_at)
        : NumericsError(what), step(step_at) {}
    long step;
};

}  // namespace muonlab
