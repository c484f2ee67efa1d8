#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qfluct {

// Base of every error the library raises. Callers that only care about
// "something numerical went wrong" catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class HermiticityError : public Error {
 public:
  using Error::Error;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

// sigma_A at or below the configured floor where a rate needs to divide by it.
class DegenerateDispersion : public Error {
 public:
  using Error::Error;
};

class EigenSolverError : public Error {
 public:
  using Error::Error;
};

// Malformed or incomplete user configuration. `path` names the offending
// field ("params.omega0"), empty when the whole document is bad.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace qfluct
