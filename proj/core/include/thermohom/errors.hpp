#pragma once

#include <stdexcept>
#include <string>

namespace thermohom {

/// Base for all failures raised by the library. The CLI maps each subclass
/// to a distinct process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Invalid cell geometry or a mesh that violates its invariants.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Boundary traces of opposite faces do not match.
class PeriodicityError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// Factorization failure, residual above tolerance, or violated
/// solvability condition.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Two reports cannot be compared entrywise.
class LayoutError : public Error {
 public:
  using Error::Error;
};

}  // namespace thermohom
