#pragma once
#include <complex>
#include <stdexcept>
#include <string>

namespace gabor {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or out-of-contract input (non-finite vectors, bad sizes, ...).
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(what) {}
};

/// Operation requires a body family it does not support (e.g. curvature of a cube).
class UnsupportedBody : public Error {
public:
    explicit UnsupportedBody(const std::string& what) : Error(what) {}
};

/// Quadrature is only wired up for d in {2, 3}.
class UnsupportedDimension : public Error {
public:
    explicit UnsupportedDimension(const std::string& what) : Error(what) {}
};

/// Result is undefined for the given input (e.g. separation of a single point).
class UndefinedResult : public Error {
public:
    explicit UndefinedResult(const std::string& what) : Error(what) {}
};

/// Least-squares calibration had no usable signal.
class CalibrationFailed : public Error {
public:
    explicit CalibrationFailed(const std::string& what) : Error(what) {}
};

/// Adaptive quadrature exhausted its budget. Carries the best estimate and
/// the error bound it reached so callers can decide whether to use it anyway.
class AccuracyNotReached : public Error {
public:
    AccuracyNotReached(const std::string& what, std::complex<double> best, double bound)
        : Error(what), best_estimate(best), error_bound(bound) {}

    std::complex<double> best_estimate;
    double error_bound;
};

}  // namespace gabor
