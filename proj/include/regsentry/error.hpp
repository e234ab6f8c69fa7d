#pragma once

#include <stdexcept>
#include <string>

namespace regsentry {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::string message, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  /// Rethrows `inner` with the file path prefixed to the message.
  ParseError(const std::string& path, const ParseError& inner)
      : Error(path + ":" + inner.what()), line_(inner.line_), column_(inner.column_) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class SemanticError : public Error {
 public:
  enum class Kind {
    UndefinedName,
    Redefinition,
    ArityMismatch,
    TypeMismatch,
    BadArrayLength,
    Recursion,
    MissingReturn,
    Misplaced,
  };

  SemanticError(Kind kind, std::string message, int line = 0)
      : Error(line > 0 ? std::to_string(line) + ": " + message : message),
        kind_(kind),
        line_(line) {}

  Kind kind() const { return kind_; }
  int line() const { return line_; }

 private:
  Kind kind_;
  int line_;
};

class UnknownFunction : public Error {
 public:
  explicit UnknownFunction(const std::string& name) : Error("unknown function '" + name + "'") {}
};

class RuntimeFault : public Error {
 public:
  enum class Kind { OutOfBounds, StepBudget, AssumeFailed };

  RuntimeFault(Kind kind, std::string message) : Error(std::move(message)), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class TraceFormatError : public Error {
 public:
  TraceFormatError(const std::string& message, int line)
      : Error("trace line " + std::to_string(line) + ": " + message), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class PointMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyChange : public Error {
 public:
  EmptyChange() : Error("no change detected") {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace regsentry
