#pragma once

#include <stdexcept>
#include <string>

namespace bcs {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A symbol, state or option that does not exist or violates a precondition.
class InvalidArgumentError : public Error {
 public:
  explicit InvalidArgumentError(const std::string& msg) : Error(msg) {}
};

/// Input text could not be parsed; carries a 1-based line/column position.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : Error(msg + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// A configured resource budget (word length, memo table, node count) was
/// exhausted before the computation finished.
class BudgetError : public Error {
 public:
  explicit BudgetError(const std::string& msg) : Error(msg) {}
};

/// The storage graph is outside the class supported by the requested solver.
class UnsupportedGraphError : public Error {
 public:
  explicit UnsupportedGraphError(const std::string& msg) : Error(msg) {}
};

}  // namespace bcs
