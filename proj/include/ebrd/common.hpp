#pragma once

#include <stdexcept>
#include <string>

namespace ebrd {

// Base class for everything this library throws.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad user input: malformed config, invalid flag combinations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure failed its contract (solver divergence,
// accuracy target unreachable, degenerate geometry).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Filesystem / stream failures, always carrying the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ebrd
