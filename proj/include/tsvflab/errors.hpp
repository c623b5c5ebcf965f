#pragma once

#include <stdexcept>
#include <string>

namespace tsvflab {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct DimensionOverflow : Error {
    using Error::Error;
};

struct NotHermitian : Error {
    using Error::Error;
};

struct NotUnitary : Error {
    using Error::Error;
};

// Pre/post selection are (numerically) orthogonal, weak values undefined.
struct OverlapVanishes : Error {
    double overlap_magnitude;
    OverlapVanishes(const std::string& what, double mag)
        : Error(what), overlap_magnitude(mag) {}
};

struct PostSelectionImpossible : Error {
    using Error::Error;
};

struct NormVanishes : Error {
    using Error::Error;
};

struct IntegrationFailure : Error {
    double achieved_error;
    IntegrationFailure(const std::string& what, double err)
        : Error(what), achieved_error(err) {}
};

struct BiasUnreachable : Error {
    double best_bias;
    double best_width;
    BiasUnreachable(const std::string& what, double bias, double width)
        : Error(what), best_bias(bias), best_width(width) {}
};

struct ParseError : Error {
    std::size_t position;
    ParseError(const std::string& what, std::size_t pos)
        : Error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

}  // namespace tsvflab
