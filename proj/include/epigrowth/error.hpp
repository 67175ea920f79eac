#pragma once

#include <stdexcept>
#include <string>

namespace epigrowth {

// Broad failure classes. The CLI maps these onto stable exit codes.
enum class ErrorKind {
  parse,
  validation,
  insufficient_data,
  empty_series,
  incomparable,
  infeasible,
  state,
  domain,
  shape,
  config,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised for malformed input text; carries the 1-based line it came from.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::empty_series: return "empty series";
    case ErrorKind::incomparable: return "incomparable growth rates";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::state: return "state error";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::shape: return "shape error";
    case ErrorKind::config: return "config error";
    case ErrorKind::io: return "I/O error";
  }
  return "error";
}

// 0 success, 2 validation, 3 I/O, 4 config.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return 3;
    case ErrorKind::config:
    case ErrorKind::infeasible: return 4;
    default: return 2;
  }
}

}  // namespace epigrowth
