#include "syntax.hpp"

#include <cctype>

#include "nexus/errors.hpp"

namespace nexus::syntax {

namespace {

bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

}  // namespace

std::string describe(Tok kind) {
  switch (kind) {
    case Tok::ident: return "identifier";
    case Tok::quoted: return "quoted constant";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::lbrack: return "'['";
    case Tok::rbrack: return "']'";
    case Tok::comma: return "','";
    case Tok::dot: return "'.'";
    case Tok::semicolon: return "';'";
    case Tok::colon: return "':'";
    case Tok::langle: return "'<'";
    case Tok::rangle: return "'>'";
    case Tok::arrow: return "'<-'";
    case Tok::neck: return "':-'";
    case Tok::end: return "end of input";
  }
  return "token";
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      advance(1);
      continue;
    }
    if (c == '%') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token tok{Tok::end, "", line, col};
    if (ident_char(c) || (c == '?' && i + 1 < text.size() &&
                          ident_char(static_cast<unsigned char>(text[i + 1])))) {
      std::size_t j = i + 1;
      while (j < text.size() && ident_char(static_cast<unsigned char>(text[j]))) ++j;
      tok.kind = Tok::ident;
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (c == '"') {
      std::string value;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < text.size()) {
        if (text[j] == '\\' && j + 1 < text.size()) {
          value += text[j + 1];
          j += 2;
        } else if (text[j] == '"') {
          closed = true;
          ++j;
          break;
        } else if (text[j] == '\n') {
          break;
        } else {
          value += text[j++];
        }
      }
      if (!closed) throw ParseError("unterminated quoted constant", line, col);
      if (value.empty()) throw ParseError("empty quoted constant", line, col);
      tok.kind = Tok::quoted;
      tok.text = std::move(value);
      advance(j - i);
    } else if (c == '<' && i + 1 < text.size() && text[i + 1] == '-') {
      tok.kind = Tok::arrow;
      advance(2);
    } else if (c == ':' && i + 1 < text.size() && text[i + 1] == '-') {
      tok.kind = Tok::neck;
      advance(2);
    } else {
      switch (c) {
        case '(': tok.kind = Tok::lparen; break;
        case ')': tok.kind = Tok::rparen; break;
        case '[': tok.kind = Tok::lbrack; break;
        case ']': tok.kind = Tok::rbrack; break;
        case ',': tok.kind = Tok::comma; break;
        case '.': tok.kind = Tok::dot; break;
        case ';': tok.kind = Tok::semicolon; break;
        case ':': tok.kind = Tok::colon; break;
        case '<': tok.kind = Tok::langle; break;
        case '>': tok.kind = Tok::rangle; break;
        default:
          throw ParseError(std::string("unexpected character '") + static_cast<char>(c) + "'",
                           line, col);
      }
      advance(1);
    }
    out.push_back(std::move(tok));
  }
  out.push_back(Token{Tok::end, "", line, col});
  return out;
}

Parser::Parser(std::string_view text) : tokens_(tokenize(text)) {}

const Token& Parser::peek(std::size_t ahead) const {
  std::size_t k = std::min(pos_ + ahead, tokens_.size() - 1);
  return tokens_[k];
}

const Token& Parser::next() {
  const Token& t = tokens_[pos_];
  if (pos_ + 1 < tokens_.size()) ++pos_;
  return t;
}

bool Parser::accept(Tok kind) {
  if (peek().kind != kind) return false;
  next();
  return true;
}

const Token& Parser::expect(Tok kind, const char* what) {
  if (peek().kind != kind)
    fail(std::string("expected ") + what + ", found " + describe(peek().kind), peek());
  return next();
}

void Parser::fail(const std::string& message, const Token& at) const {
  throw ParseError(message, at.line, at.column);
}

Term Parser::term(TermMode mode) {
  const Token& t = peek();
  if (t.kind != Tok::ident && t.kind != Tok::quoted)
    fail("expected a term, found " + describe(t.kind), t);
  next();
  bool variable = false;
  if (mode == TermMode::formula && t.kind == Tok::ident) {
    unsigned char c0 = static_cast<unsigned char>(t.text[0]);
    variable = std::isupper(c0) || c0 == '?';
  }
  std::vector<std::string> index;
  if (mode == TermMode::formula && peek().kind == Tok::lbrack) {
    next();
    do {
      const Token& e = peek();
      if (e.kind != Tok::ident && e.kind != Tok::quoted)
        fail("expected a constant in term index, found " + describe(e.kind), e);
      index.push_back(next().text);
    } while (accept(Tok::comma));
    expect(Tok::rbrack, "']'");
  }
  return Term::indexed(variable ? TermKind::variable : TermKind::constant, t.text,
                       std::move(index));
}

Atom Parser::atom(TermMode mode) {
  const Token& p = peek();
  if (p.kind != Tok::ident) fail("expected a predicate name, found " + describe(p.kind), p);
  std::string predicate = next().text;
  expect(Tok::lparen, "'('");
  std::vector<Term> args;
  if (peek().kind == Tok::rparen) fail("atoms need at least one argument", peek());
  do {
    args.push_back(term(mode));
  } while (accept(Tok::comma));
  expect(Tok::rparen, "')'");
  if (predicate == kTop && args.size() != 1)
    fail("predicate 'top' has arity 1, got " + std::to_string(args.size()), p);
  return Atom(std::move(predicate), std::move(args));
}

Tuple Parser::constants_until(Tok close) {
  Tuple out;
  if (peek().kind == close) return out;
  do {
    out.push_back(term(TermMode::ground));
  } while (accept(Tok::comma));
  return out;
}

}  // namespace nexus::syntax
