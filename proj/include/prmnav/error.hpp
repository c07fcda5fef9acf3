#pragma once

#include <stdexcept>
#include <string>

namespace prmnav {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed model output, JSON, or file contents.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Invalid arguments or configuration supplied by the caller.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Network failures from remote backends (after retries were exhausted).
class TransportError : public Error {
 public:
  using Error::Error;
};

// A lookup against a screen or script that has no matching entry.
class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace prmnav
