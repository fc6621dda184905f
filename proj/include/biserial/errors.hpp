#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace biserial {

/// Base type for all domain-level failures; the CLI maps these to exit code 1.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BudgetExceeded : DomainError {
  using DomainError::DomainError;
};

struct NonMonomialRelations : DomainError {
  using DomainError::DomainError;
};

struct NotCompleteGentle : DomainError {
  using DomainError::DomainError;
};

struct CompletionFailed : DomainError {
  using DomainError::DomainError;
};

struct SplitInconclusive : DomainError {
  using DomainError::DomainError;
};

struct ThetaMismatch : DomainError {
  using DomainError::DomainError;
};

struct GenericPointUnstable : DomainError {
  using DomainError::DomainError;
};

struct SummandNotStable : DomainError {
  using DomainError::DomainError;
};

/// Parse failure in the quiver text format; carries 1-based location.
struct ParseError : DomainError {
  std::size_t line;
  std::size_t column;
  ParseError(std::size_t ln, std::size_t col, const std::string& what)
      : DomainError("parse error at line " + std::to_string(ln) + ", column " +
                    std::to_string(col) + ": " + what),
        line(ln),
        column(col) {}
};

}  // namespace biserial
