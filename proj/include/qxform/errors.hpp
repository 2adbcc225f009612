#pragma once

#include <stdexcept>
#include <string>

namespace qxform {

// Failure categories. The CLI maps each category onto an exit code.
enum class ErrorKind {
  InvalidDimension,
  Parameter,
  Layout,
  Numeric,
  Singularity,
  Convergence,
  Truncation,
  Unsupported,
  OutOfRange,
  Positivity,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Layout: return "layout";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::Unsupported: return "unsupported-case";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::Positivity: return "positivity";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace qxform
