#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace thetacbc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Matrix or vector dimensions do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Input violates a documented invariant (asymmetric matrix, bad density, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Caller broke an operation precondition (e.g. non-unit direction).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Inflated set size s + theta is negative.
class DegenerateSetError : public Error {
public:
    using Error::Error;
};

class UnsupportedConfiguration : public Error {
public:
    using Error::Error;
};

/// eta/beta/c do not form a usable barrier certificate.
class InvalidCertificate : public Error {
public:
    using Error::Error;
};

/// Riccati iteration did not converge to a stabilizing gain.
class UnstabilizableError : public Error {
public:
    using Error::Error;
};

/// Closed loop is not Schur stable, so no quadratic certificate exists.
class NoCertificateError : public Error {
public:
    using Error::Error;
};

/// Scenario document does not match the schema. `path()` is a JSON pointer.
class SchemaError : public ValidationError {
public:
    SchemaError(std::string path, const std::string& what)
        : ValidationError(path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace thetacbc
