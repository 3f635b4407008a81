#pragma once

#include <stdexcept>
#include <string>

namespace eigentraj {

enum class ErrorKind {
  argument,  // precondition on a scalar parameter violated
  shape,     // dimension mismatch between operands
  parse,     // malformed text input
  data,      // well-formed input whose content violates an invariant
  config,    // unknown scene, missing artifact, bad config field
  numeric,   // solver failed to converge or system is singular
  io,        // file could not be read or written
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Parse errors carry the 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Process exit status for an error kind: 2 configuration/argument, 3 data, 4 numeric.
int exit_code(ErrorKind kind) noexcept;

const char* to_string(ErrorKind kind) noexcept;

}  // namespace eigentraj
