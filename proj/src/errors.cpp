#include "eigentraj/errors.hpp"

namespace eigentraj {

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::argument:
    case ErrorKind::shape:
    case ErrorKind::config:
      return 2;
    case ErrorKind::parse:
    case ErrorKind::data:
    case ErrorKind::io:
      return 3;
    case ErrorKind::numeric:
      return 4;
  }
  return 1;
}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::argument: return "argument";
    case ErrorKind::shape: return "shape";
    case ErrorKind::parse: return "parse";
    case ErrorKind::data: return "data";
    case ErrorKind::config: return "config";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace eigentraj
