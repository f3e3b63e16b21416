#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rmlkit {

// Malformed formula text. Carries the source position and the token set the
// parser would have accepted there.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string what, int line, int column, std::vector<std::string> expected)
      : std::runtime_error(std::move(what)),
        line(line),
        column(column),
        expected(std::move(expected)) {}

  int line;
  int column;
  std::vector<std::string> expected;
};

// A structural invariant of a model, action model, or relation is violated.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An operation was applied outside its domain (e.g. a refinement quantifier
// where a plain modal formula is required).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configurable resource cap (AST node budget, enumeration cap) was hit.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rmlkit
