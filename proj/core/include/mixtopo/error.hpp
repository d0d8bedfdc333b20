#pragma once

#include <stdexcept>
#include <string>

namespace mixtopo {

// Base for every failure raised by the library. Each subclass maps onto one
// failure class of the numerical pipeline so callers (and the CLI exit-code
// table) can dispatch on type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonHermitianInput : public Error {
public:
    using Error::Error;
};

class NotPositive : public Error {
public:
    using Error::Error;
};

class NonFiniteInput : public Error {
public:
    using Error::Error;
};

// Smallest singular value at or below the invertibility threshold. Upstream
// this usually means a purity-gap closing or a singular state.
class RankDeficient : public Error {
public:
    explicit RankDeficient(const std::string& what, long segment = -1)
        : Error(what), segment_(segment) {}
    // Offending path segment (index i of the step k_{i-1} -> k_i), or -1.
    long segment() const noexcept { return segment_; }

private:
    long segment_;
};

class GapClosed : public Error {
public:
    using Error::Error;
};

class SpectralConstraintViolated : public Error {
public:
    using Error::Error;
};

class ZeroTrace : public Error {
public:
    using Error::Error;
};

class UnderResolved : public Error {
public:
    using Error::Error;
};

class PlaquetteOverflow : public Error {
public:
    using Error::Error;
};

class NoTransition : public Error {
public:
    using Error::Error;
};

// Malformed model file / config file. Message cites the line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace mixtopo
