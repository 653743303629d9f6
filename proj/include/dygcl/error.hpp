#pragma once

#include <stdexcept>
#include <string>

namespace dygcl {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Non-finite values, degenerate norms, divergence.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Structural invariants violated (bad indices, malformed graphs).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Bad configuration or usage; maps to CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input files.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Filesystem failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dygcl
