#pragma once

#include <stdexcept>
#include <string>

namespace dispersar {

/// Argument outside the mathematical domain of a function (x <= 0, |t| > 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Base for failures of a numerical procedure on otherwise valid input.
/// The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularSystemError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ZeroImageError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateSpectrumError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoTargetsFoundError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Invalid experiment configuration. `path()` names the offending field,
/// e.g. "noise.seed" or "targets[1].sphere.n_rel".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace dispersar
