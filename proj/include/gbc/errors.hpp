#pragma once

#include <stdexcept>
#include <string>

namespace gbc {

// Error hierarchy. The CLI maps each type onto a distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid hyperparameters or arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data that violates a Dataset invariant.
class DataError : public Error {
 public:
  using Error::Error;
};

// Unreadable or unwritable files.
class IoError : public Error {
 public:
  using Error::Error;
};

// A model document that cannot be parsed or fails schema checks.
class ModelFormatError : public Error {
 public:
  using Error::Error;
};

// A model document with an unsupported format_version.
class ModelVersionError : public ModelFormatError {
 public:
  using ModelFormatError::ModelFormatError;
};

}  // namespace gbc
