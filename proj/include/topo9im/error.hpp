#pragma once

#include <stdexcept>
#include <string>

namespace topo9im {

// Every failure the library reports derives from Error. Subclasses are
// grouped by the layer that raises them so callers (the CLI in particular)
// can map them onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text: rationals, OFF files, set expressions, rule files.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Geometric preconditions.
class EmptyGeometry : public Error {
 public:
  using Error::Error;
};
class Unbounded : public Error {
 public:
  using Error::Error;
};
class InvalidBody : public Error {
 public:
  using Error::Error;
};
class UnsupportedComposite : public Error {
 public:
  using Error::Error;
};
class UnclassifiableMatrix : public Error {
 public:
  using Error::Error;
};

// Knowledge base and rules.
class VocabularyConflict : public Error {
 public:
  using Error::Error;
};
class SafetyError : public Error {
 public:
  using Error::Error;
};
class UnknownBuiltin : public Error {
 public:
  using Error::Error;
};
class MissingGeometry : public Error {
 public:
  using Error::Error;
};
class TypeError : public Error {
 public:
  using Error::Error;
};

// Scene ingestion and CLI.
class IoError : public Error {
 public:
  using Error::Error;
};
class UsageError : public Error {
 public:
  using Error::Error;
};

// Syntax error with a 1-based source position.
class SyntaxError : public ParseError {
 public:
  SyntaxError(const std::string& msg, int line, int column)
      : ParseError(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace topo9im
