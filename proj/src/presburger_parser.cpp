// Recursive-descent parser for the textual formula syntax:
//
//   formula := iff
//   iff     := implies ('<=>' implies)*
//   implies := or ('=>' implies)?
//   or      := and ('or' and)*
//   and     := unary ('and' unary)*
//   unary   := 'not' unary | ('exists' | 'forall') ident+ '.' formula | atom
//   atom    := 'true' | 'false' | term rel term | '(' formula ')'
//   term    := ['-'] factor (('+' | '-') factor)*
//   factor  := int ['*' (ident | '(' term ')')] | ident | '(' term ')'
//
// '#' starts a comment running to the end of the line.

#include "polyabs/presburger.hpp"

#include <cctype>
#include <charconv>

namespace polyabs {

ParseError::ParseError(const std::string& message, std::size_t line_, std::size_t column_)
    : std::runtime_error(std::to_string(line_) + ":" + std::to_string(column_) + ": " + message),
      line(line_),
      column(column_) {}

namespace {

enum class Tok { Ident, Int, Sym, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

std::vector<Token> tokenize(std::string_view src, std::size_t line_offset) {
  std::vector<Token> out;
  std::size_t line = 1 + line_offset, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      if (t.text == "mod" || t.text == "div")
        throw ParseError("divisibility predicates are not supported", t.line, t.column);
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Int;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else {
      static constexpr std::string_view symbols[] = {"<=>", "=>", "<=", ">=", "=", "<", ">", "(",
                                                     ")",   "+",  "-",  "*",  "."};
      std::string_view rest = src.substr(i);
      bool matched = false;
      for (auto s : symbols) {
        if (rest.substr(0, s.size()) == s) {
          t.kind = Tok::Sym;
          t.text = std::string(s);
          advance(s.size());
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (c == '%' || c == '|')
          throw ParseError("divisibility predicates are not supported", t.line, t.column);
        throw ParseError(std::string("unexpected character '") + c + "'", t.line, t.column);
      }
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

bool is_keyword(const std::string& s) {
  return s == "not" || s == "and" || s == "or" || s == "exists" || s == "forall" || s == "true" || s == "false";
}

class Parser {
public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Formula parse_all() {
    if (peek().kind == Tok::End) fail("empty formula");
    Formula f = parse_iff();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return f;
  }

private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  bool at_sym(std::string_view s) const { return peek().kind == Tok::Sym && peek().text == s; }
  bool at_kw(std::string_view s) const { return peek().kind == Tok::Ident && peek().text == s; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().column); }

  void expect_sym(std::string_view s) {
    if (!at_sym(s)) fail("expected '" + std::string(s) + "'" + (peek().kind == Tok::End ? " at end of input" : " but found '" + peek().text + "'"));
    ++pos_;
  }

  Formula parse_iff() {
    Formula f = parse_implies();
    while (at_sym("<=>")) {
      ++pos_;
      f = Formula::iff(std::move(f), parse_implies());
    }
    return f;
  }

  Formula parse_implies() {
    Formula f = parse_or();
    if (at_sym("=>")) {
      ++pos_;
      return Formula::implies(std::move(f), parse_implies());
    }
    return f;
  }

  Formula parse_or() {
    std::vector<Formula> parts{parse_and()};
    while (at_kw("or")) {
      ++pos_;
      parts.push_back(parse_and());
    }
    return parts.size() == 1 ? parts.front() : Formula::disj(std::move(parts));
  }

  Formula parse_and() {
    std::vector<Formula> parts{parse_unary()};
    while (at_kw("and")) {
      ++pos_;
      parts.push_back(parse_unary());
    }
    return parts.size() == 1 ? parts.front() : Formula::conj(std::move(parts));
  }

  Formula parse_unary() {
    if (at_kw("not")) {
      ++pos_;
      return Formula::negate(parse_unary());
    }
    if (at_kw("exists") || at_kw("forall")) {
      bool ex = at_kw("exists");
      ++pos_;
      std::vector<std::string> vars;
      while (peek().kind == Tok::Ident && !is_keyword(peek().text)) vars.push_back(toks_[pos_++].text);
      if (vars.empty()) fail("quantifier needs at least one variable");
      expect_sym(".");
      Formula body = parse_iff();
      return ex ? Formula::exists(std::move(vars), std::move(body)) : Formula::forall(std::move(vars), std::move(body));
    }
    return parse_atom();
  }

  Formula parse_atom() {
    if (at_kw("true")) {
      ++pos_;
      return Formula::top();
    }
    if (at_kw("false")) {
      ++pos_;
      return Formula::bottom();
    }
    if (at_sym("(")) {
      // Either a parenthesized formula or a comparison whose left term
      // starts with '('. Try the comparison first.
      std::size_t save = pos_;
      try {
        return parse_comparison();
      } catch (const ParseError&) {
        pos_ = save;
      }
      ++pos_;
      Formula f = parse_iff();
      expect_sym(")");
      return f;
    }
    return parse_comparison();
  }

  Formula parse_comparison() {
    LinearTerm lhs = parse_term();
    Relation rel;
    if (at_sym("=")) rel = Relation::Eq;
    else if (at_sym("<=")) rel = Relation::Le;
    else if (at_sym("<")) rel = Relation::Lt;
    else if (at_sym(">=")) rel = Relation::Ge;
    else if (at_sym(">")) rel = Relation::Gt;
    else fail("expected a comparison operator");
    ++pos_;
    LinearTerm rhs = parse_term();
    return Formula::compare(std::move(lhs), rel, std::move(rhs));
  }

  LinearTerm parse_term() {
    bool negative = false;
    if (at_sym("-")) {
      negative = true;
      ++pos_;
    }
    LinearTerm t = parse_factor();
    if (negative) t = t.scaled(-1);
    while (at_sym("+") || at_sym("-")) {
      bool minus = at_sym("-");
      ++pos_;
      LinearTerm f = parse_factor();
      if (minus) t -= f;
      else t += f;
    }
    return t;
  }

  LinearTerm parse_factor() {
    if (peek().kind == Tok::Int) {
      std::int64_t k = 0;
      const std::string& s = peek().text;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), k);
      if (ec != std::errc() || p != s.data() + s.size()) fail("integer constant out of range");
      ++pos_;
      if (!at_sym("*")) return LinearTerm(k);
      ++pos_;
      if (at_sym("(")) {
        ++pos_;
        LinearTerm inner = parse_term();
        expect_sym(")");
        return inner.scaled(k);
      }
      return LinearTerm::var(parse_identifier(), k);
    }
    if (at_sym("(")) {
      ++pos_;
      LinearTerm inner = parse_term();
      expect_sym(")");
      return inner;
    }
    return LinearTerm::var(parse_identifier());
  }

  std::string parse_identifier() {
    if (peek().kind != Tok::Ident || is_keyword(peek().text))
      fail(peek().kind == Tok::End ? "unexpected end of input" : "expected a variable but found '" + peek().text + "'");
    return toks_[pos_++].text;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_formula(std::string_view text, std::size_t line_offset) {
  return Parser(tokenize(text, line_offset)).parse_all();
}

}  // namespace polyabs
