#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlw {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An axis has fewer points than the stencils require.
class GridTooSmall : public Error {
public:
    using Error::Error;
};

/// Two fields (or a field and a grid) do not describe the same discretization.
class GridMismatch : public Error {
public:
    using Error::Error;
};

/// Time step violates the explicit stability bound.
class CflViolation : public Error {
public:
    using Error::Error;
};

/// Bad argument that is not covered by a more specific error.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// File I/O and serialization failures (missing file, bad magic, truncated payload).
class IoError : public Error {
public:
    using Error::Error;
};

/// Non-finite values, blow-up, or other failures detected while time stepping.
class NumericalFailure : public Error {
public:
    NumericalFailure(const std::string& what, std::size_t step)
        : Error(what), step_(step) {}
    explicit NumericalFailure(const std::string& what) : Error(what) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_ = 0;
};

/// |q| exceeded the validity radius of the remainder term.
class ValidityRadiusExceeded : public Error {
public:
    ValidityRadiusExceeded(const std::string& what, std::size_t k, std::size_t j, std::size_t i)
        : Error(what), k_(k), j_(j), i_(i) {}
    std::size_t k() const noexcept { return k_; }
    std::size_t j() const noexcept { return j_; }
    std::size_t i() const noexcept { return i_; }

private:
    std::size_t k_, j_, i_;
};

/// Picard iterates failed to contract or did not meet the tolerance in time.
class PicardFailure : public Error {
public:
    PicardFailure(const std::string& what, std::vector<double> history)
        : Error(what), history_(std::move(history)) {}
    const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

/// Configuration file or override could not be accepted.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace nlw
