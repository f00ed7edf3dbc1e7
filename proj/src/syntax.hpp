#pragma once

// Tokenizer and term/atom parsing shared by the formula, facts, rules and
// summary-table readers.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nexus/relcore.hpp"

namespace nexus::syntax {

enum class Tok { ident, quoted, lparen, rparen, lbrack, rbrack, comma, dot, semicolon, colon,
                 langle, rangle, arrow, neck, end };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

// `%` starts a comment running to end of line.
std::vector<Token> tokenize(std::string_view text);

enum class TermMode {
  ground,     // every identifier is a constant
  formula,    // uppercase or '?' start is a variable; optional [..] index
};

class Parser {
 public:
  explicit Parser(std::string_view text);

  const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  bool accept(Tok kind);
  const Token& expect(Tok kind, const char* what);
  bool at_end() const { return peek().kind == Tok::end; }

  Term term(TermMode mode);
  Atom atom(TermMode mode);
  // Comma-separated constants, used for tuples inside `<...>`.
  Tuple constants_until(Tok close);

  [[noreturn]] void fail(const std::string& message, const Token& at) const;

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

std::string describe(Tok kind);

}  // namespace nexus::syntax
