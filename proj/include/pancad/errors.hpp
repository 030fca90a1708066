#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pancad {

/// Base class of every error raised by the library. Errors that derive from
/// `Error` describe bad input; `InvariantViolation` is an internal bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidEntity : public Error {
 public:
  using Error::Error;
};

class NotParallel : public Error {
 public:
  NotParallel() : Error("entities are not parallel segments") {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line), reason_(reason) {}

  std::size_t line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class UnknownClass : public Error {
 public:
  explicit UnknownClass(const std::string& name) : Error("unknown class '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyDataset : public Error {
 public:
  EmptyDataset() : Error("dataset contains no labeled entities") {}
};

class CanvasTooLarge : public Error {
 public:
  using Error::Error;
};

class InfeasibleConfig : public Error {
 public:
  using Error::Error;
};

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pancad
