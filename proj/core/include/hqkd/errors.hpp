#pragma once

#include <stdexcept>
#include <string>

namespace hqkd {

// Base of every error raised by the library. Subclasses exist so callers
// (the CLI in particular) can map failures to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Raised when an attack program or a channel geometry would give Eve
// simultaneous access to both travelling qubits.
class SequentialAccessViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace hqkd
