#pragma once

#include <stdexcept>
#include <string>

namespace qflab {

// Base of every error the library throws. The CLI maps ConfigError to exit
// code 2; anything else is a runtime failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Spectrum reconstruction failed off-grid: the declared maximum frequency is
// too small for the signal.
class AliasingError : public Error {
 public:
  using Error::Error;
};

class InversionError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace qflab
