#pragma once

#include <stdexcept>
#include <string>

namespace shape {

// Base of every error thrown by the core library. The C API maps each
// subclass onto a distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration value or combination (alpha >= 0.5, l_ref = 0, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A caller-supplied input violates an operation's precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Sizes of related inputs disagree (profile vs lengths, plan vs tokens).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed JSONL / config text.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// One or more records break their invariants; the message lists them.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class OracleError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Policy logits left the configured magnitude bound during training.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace shape
