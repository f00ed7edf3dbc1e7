#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nexus {

// Malformed input text. Line and column are 1-based; zero when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& bare_message() const { return bare_; }

 private:
  std::string bare_;
  std::size_t line_;
  std::size_t column_;
};

// Well-formed input that violates a semantic precondition (unknown constant,
// arity mismatch, tuple already in unit, selector contract, ...).
class SemanticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configured size cap was exceeded.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& message, std::size_t limit, std::size_t requested)
      : std::runtime_error(message), limit_(limit), requested_(requested) {}

  std::size_t limit() const { return limit_; }
  std::size_t requested() const { return requested_; }

 private:
  std::size_t limit_;
  std::size_t requested_;
};

}  // namespace nexus
