#pragma once

#include <stdexcept>
#include <string>

namespace beamlab {

// Process exit codes used by the CLI.
enum class ExitCode : int { ok = 0, config = 2, numeric = 3, resource = 4 };

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept { return ExitCode::numeric; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::config; }
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::resource; }
};

}  // namespace beamlab
