#pragma once

#include <stdexcept>
#include <string>

namespace ozlab {

// failure categories; the CLI maps them onto exit codes
enum class ErrorKind {
  contract,     // caller violated a precondition (dimension mismatch, ...)
  domain,       // parameter outside the model's domain (beta <= 0, ...)
  resource,     // enumeration cap or state-space limit exceeded
  data,         // not enough data to form an estimate
  divergence,   // series or root search does not converge
  range,        // floating-point overflow
  unsupported,  // valid request this build does not implement
  fit,          // ill-conditioned regression
  usage,        // malformed configuration or command line
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace ozlab
