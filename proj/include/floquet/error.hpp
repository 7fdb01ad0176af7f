#pragma once

#include <stdexcept>
#include <string>

namespace floquet {

/// Failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  parse,         ///< malformed input file or schema violation
  validation,    ///< operator description is inconsistent
  precondition,  ///< operation called outside its domain
  inconclusive,  ///< numerical verdict could not be reached
  numerical,     ///< iteration failed to converge, contour breach, ...
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::validation: return "validation";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::inconclusive: return "inconclusive";
    case ErrorKind::numerical: return "numerical";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace floquet
