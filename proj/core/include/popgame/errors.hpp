#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace popgame {

/// A protocol, game or configuration violates a structural invariant
/// (state index out of range, non-square matrix, population too small...).
class StructuralError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Text input could not be parsed. Line and column are 1-based; 0 means
/// "not applicable" (e.g. single-line expressions only carry a column).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string &message, std::size_t line, std::size_t column);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

/// An exhaustive exploration hit its configured node or candidate budget.
class BudgetExceeded : public std::runtime_error {
public:
  BudgetExceeded(const std::string &what, std::size_t budget);

  std::size_t budget() const noexcept { return budget_; }

private:
  std::size_t budget_;
};

} // namespace popgame
