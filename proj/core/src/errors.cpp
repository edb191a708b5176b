#include "popgame/errors.hpp"

namespace popgame {

namespace {

std::string located(const std::string &message, std::size_t line, std::size_t column) {
  std::string prefix;
  if (line > 0) {
    prefix = "line " + std::to_string(line);
    if (column > 0) {
      prefix += ", column " + std::to_string(column);
    }
  } else if (column > 0) {
    prefix = "column " + std::to_string(column);
  }
  return prefix.empty() ? message : prefix + ": " + message;
}

} // namespace

ParseError::ParseError(const std::string &message, std::size_t line, std::size_t column)
    : std::runtime_error(located(message, line, column)), line_(line), column_(column) {}

BudgetExceeded::BudgetExceeded(const std::string &what, std::size_t budget)
    : std::runtime_error(what + " (budget " + std::to_string(budget) + ")"), budget_(budget) {}

} // namespace popgame
