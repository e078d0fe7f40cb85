#pragma once

#include <stdexcept>
#include <string>

namespace rnet {

/// Broad failure classes; the CLI maps them onto exit codes.
enum class ErrorKind {
    InvalidInput,   // malformed data or violated preconditions
    SolverFailure,  // singular / degenerate numerics
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& what) : Error(ErrorKind::InvalidInput, what) {}
};

class DimensionMismatch : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class InvalidConductance : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class SpecMismatch : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class SolverError : public Error {
public:
    explicit SolverError(const std::string& what) : Error(ErrorKind::SolverFailure, what) {}
};

class SingularMatrix : public SolverError {
public:
    using SolverError::SolverError;
};

class SingularBlock : public SolverError {
public:
    using SolverError::SolverError;
};

class DegenerateDelta : public SolverError {
public:
    using SolverError::SolverError;
};

class ZeroDivisor : public SolverError {
public:
    using SolverError::SolverError;
};

class ResidualTooLarge : public SolverError {
public:
    using SolverError::SolverError;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

}  // namespace rnet
