#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace secdsc {

// Base of every error the library raises. `kind()` is a short stable tag used
// by the command-line front end for machine-parsable failure lines.
class Error : public std::runtime_error {
 public:
  Error(std::string_view kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  std::string_view kind() const noexcept { return kind_; }

 private:
  std::string_view kind_;
};

// A variable label that is not present in the distribution.
class LabelError : public Error {
 public:
  explicit LabelError(const std::string& message) : Error("label", message) {}
};

// Malformed arguments: overlapping variable sets, out-of-range scalars.
class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& message)
      : Error("argument", message) {}
};

// Cardinality or dimension mismatch between objects that must agree.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& message) : Error("shape", message) {}
};

// A structural hypothesis on the source model does not hold.
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& message)
      : Error("precondition", message) {}
};

// An enumeration would exceed the configured budget.
class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& message)
      : Error("resource", message) {}
};

// Invalid external input (documents, configuration files).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error("validation", message) {}
};

}  // namespace secdsc
