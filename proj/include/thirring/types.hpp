#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace thirring {

using cplx = std::complex<double>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed configuration or command line (CLI exit code 1).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed (CLI exit code 2).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Picard iteration exhausted max_iter without reaching tol.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, int iterations, double last_ratio)
        : NumericalError(what), iterations_(iterations), last_ratio_(last_ratio) {}

    int iterations() const noexcept { return iterations_; }
    double last_ratio() const noexcept { return last_ratio_; }

private:
    int iterations_;
    double last_ratio_;
};

/// The step radius of the continuation loop fell below two grid spacings.
class ConcentrationSuspected : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace thirring
