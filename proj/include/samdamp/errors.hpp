#pragma once

#include <stdexcept>
#include <string>

namespace samdamp {

/// Coarse failure class. The CLI maps these onto exit codes.
enum class ErrorCategory { config, numerical, io };

inline const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::numerical: return "numerical";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// A configuration value violates its invariant. `field()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& reason)
      : Error(ErrorCategory::config, field + ": " + reason), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorCategory::numerical, what) {}
};

class InvalidStateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularConfigurationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Matrix dimensions do not fit together.
class StructuralError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class UncontrollableModelError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SynthesisFailedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SamplingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace samdamp
