#pragma once

#include <stdexcept>
#include <string>

namespace ttc {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// An input violates a construction invariant (shape, Hermiticity, PSD,
/// completeness, schedule ordering...). The message carries the measured
/// residual.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A numerical routine failed or produced out-of-contract values
/// (eigendecomposition did not converge, imaginary parts too large).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The model produced values inconsistent with a probability interpretation
/// (negative probabilities, disagreeing evaluation routes, dead ends).
class ModelValidityError : public Error {
public:
    using Error::Error;
};

/// A history operator with (numerically) zero trace: the branch is
/// impossible and its normalized state undefined. Callers treat the record
/// as probability zero, not as a crash.
class ZeroWeightError : public Error {
public:
    using Error::Error;
};

/// Exhaustive enumeration would exceed the configured cap.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// A config file failed to parse or match the schema.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column)
        : Error(msg), line_(line), column_(column) {}
    explicit ParseError(const std::string& msg) : Error(msg) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_ = -1;
    int column_ = -1;
};

/// Central tolerance configuration. One instance with these defaults is
/// used everywhere unless a caller overrides it.
struct Tolerances {
    double herm = 1e-12;      // entrywise |A - A^dagger|
    double unitary = 1e-10;   // max entrywise |U U^dagger - 1|
    double psd = 1e-10;       // eigenvalue floor for positive operators
    double complete = 1e-10;  // max entrywise |sum_a w_a L_a^2 - 1|
    double sym = 1e-10;       // max entrywise |A - A^T|
    double zero = 1e-14;      // traces below this count as zero weight
    double imag = 1e-9;       // imaginary part allowed in a probability
};

inline const Tolerances& default_tolerances() {
    static const Tolerances tol{};
    return tol;
}

}  // namespace ttc
