#pragma once

#include <stdexcept>
#include <string>

namespace regrasp {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs whose shape is wrong: length mismatches, bad indices, broken invariants.
class StructuralInputError : public Error {
 public:
  using Error::Error;
};

/// Point sets or meshes that do not span a volume (flat, collinear, collapsed).
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

/// A callback produced NaN or infinity.
class NumericEvaluationError : public Error {
 public:
  using Error::Error;
};

/// Missing or inconsistent configuration (e.g. finger roles absent).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Failure to read or validate a document. `field()` names the offending
/// JSON path (e.g. "goal_contacts_object_frame[2]") when known.
class LoadError : public Error {
 public:
  LoadError(const std::string& what, std::string field = {})
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace regrasp
