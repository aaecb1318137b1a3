#pragma once

// Formula and action syntax trees for the dynamic logic, a recursive-descent
// parser for the ASCII surface language, and a canonical pretty-printer whose
// output parses back to a structurally identical tree.
//
// Grammar (precedence low to high):
//   formula  := impl
//   impl     := orf  (("->" | "~>") impl)?          right-associative
//   orf      := andf (("|" | "(+)") andf)*
//   andf     := unary ("&" unary)*
//   unary    := "T" | "F" | "!" unary | "~" unary
//             | "[" action "]" unary | "<" action ">" unary | "(" formula ")"
//   action   := unionact
//   unionact := seqact ("U" seqact)*
//   seqact   := postact (";" postact)*
//   postact  := prim ("^-1")*
//   prim     := "h(" opexpr ")" | formula "?" | formula "?q" | "(" action ")"
//   opexpr   := sumop
//   sumop    := prodop ("+" prodop)*
//   prodop   := scalar? atomop ("*"? atomop)*
//   atomop   := "a(" nat ")" | "adag(" nat ")" | "id" | "zero" | "(" opexpr ")"
//   scalar   := complex-literal | "(" complex-literal ")"
//             | "exp(i*" real ")" | "U(" nat "," nat ")"
//
// Complex literals: "2", "1.5i", "0.5+0.5i", "-1", "1e-3-2e-4i". A trailing
// "i" is the imaginary suffix only when not followed by another identifier
// character, so "2id" still reads as the scalar 2 times the identity.

#include <cctype>
#include <charconv>
#include <memory>
#include <string>
#include <string_view>

#include "fockdl/operators.hpp"

namespace fockdl {

enum class FormulaKind {
  Top,
  Bot,
  ClassicalNot,
  QuantumNot,
  And,
  ClassicalOr,
  QuantumOr,
  Implies,
  SasakiHook,
  Box,
  Diamond
};

enum class ActionKind { Basic, Seq, Inverse, ClassicalTest, QuantumTest, Union };

struct Formula;
struct Action;
using FormulaPtr = std::shared_ptr<const Formula>;
using ActionPtr = std::shared_ptr<const Action>;

struct Action {
  ActionKind kind;
  std::optional<OperatorExpr> op;  // Basic
  ActionPtr left;                  // Seq/Union first argument; Inverse child
  ActionPtr right;                 // Seq/Union second argument
  FormulaPtr test;                 // ClassicalTest/QuantumTest
};

struct Formula {
  FormulaKind kind;
  FormulaPtr left;    // unary child or binary first argument
  FormulaPtr right;   // binary second argument
  ActionPtr action;   // Box/Diamond
};

inline FormulaPtr make_top() { return std::make_shared<Formula>(Formula{FormulaKind::Top, {}, {}, {}}); }
inline FormulaPtr make_bot() { return std::make_shared<Formula>(Formula{FormulaKind::Bot, {}, {}, {}}); }
inline FormulaPtr make_not(FormulaPtr a) {
  return std::make_shared<Formula>(Formula{FormulaKind::ClassicalNot, std::move(a), {}, {}});
}
inline FormulaPtr make_qnot(FormulaPtr a) {
  return std::make_shared<Formula>(Formula{FormulaKind::QuantumNot, std::move(a), {}, {}});
}
inline FormulaPtr make_and(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(Formula{FormulaKind::And, std::move(a), std::move(b), {}});
}
inline FormulaPtr make_or(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(Formula{FormulaKind::ClassicalOr, std::move(a), std::move(b), {}});
}
inline FormulaPtr make_qor(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(Formula{FormulaKind::QuantumOr, std::move(a), std::move(b), {}});
}
inline FormulaPtr make_implies(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(Formula{FormulaKind::Implies, std::move(a), std::move(b), {}});
}
inline FormulaPtr make_sasaki(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(Formula{FormulaKind::SasakiHook, std::move(a), std::move(b), {}});
}
inline FormulaPtr make_box(ActionPtr a, FormulaPtr body) {
  return std::make_shared<Formula>(Formula{FormulaKind::Box, std::move(body), {}, std::move(a)});
}
inline FormulaPtr make_diamond(ActionPtr a, FormulaPtr body) {
  return std::make_shared<Formula>(Formula{FormulaKind::Diamond, std::move(body), {}, std::move(a)});
}

inline ActionPtr make_basic(OperatorExpr op) {
  return std::make_shared<Action>(Action{ActionKind::Basic, std::move(op), {}, {}, {}});
}
inline ActionPtr make_seq(ActionPtr a, ActionPtr b) {
  return std::make_shared<Action>(Action{ActionKind::Seq, {}, std::move(a), std::move(b), {}});
}
inline ActionPtr make_inverse(ActionPtr a) {
  return std::make_shared<Action>(Action{ActionKind::Inverse, {}, std::move(a), {}, {}});
}
inline ActionPtr make_test(FormulaPtr a) {
  return std::make_shared<Action>(Action{ActionKind::ClassicalTest, {}, {}, {}, std::move(a)});
}
inline ActionPtr make_qtest(FormulaPtr a) {
  return std::make_shared<Action>(Action{ActionKind::QuantumTest, {}, {}, {}, std::move(a)});
}
inline ActionPtr make_union(ActionPtr a, ActionPtr b) {
  return std::make_shared<Action>(Action{ActionKind::Union, {}, std::move(a), std::move(b), {}});
}

bool equal(const FormulaPtr& a, const FormulaPtr& b);
bool equal(const ActionPtr& a, const ActionPtr& b);

inline bool equal(const ActionPtr& a, const ActionPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ActionKind::Basic:
      return *a->op == *b->op;
    case ActionKind::Seq:
    case ActionKind::Union:
      return equal(a->left, b->left) && equal(a->right, b->right);
    case ActionKind::Inverse:
      return equal(a->left, b->left);
    case ActionKind::ClassicalTest:
    case ActionKind::QuantumTest:
      return equal(a->test, b->test);
  }
  return false;
}

inline bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case FormulaKind::Top:
    case FormulaKind::Bot:
      return true;
    case FormulaKind::ClassicalNot:
    case FormulaKind::QuantumNot:
      return equal(a->left, b->left);
    case FormulaKind::And:
    case FormulaKind::ClassicalOr:
    case FormulaKind::QuantumOr:
    case FormulaKind::Implies:
    case FormulaKind::SasakiHook:
      return equal(a->left, b->left) && equal(a->right, b->right);
    case FormulaKind::Box:
    case FormulaKind::Diamond:
      return equal(a->action, b->action) && equal(a->left, b->left);
  }
  return false;
}

// Thrown on malformed input; position is a 0-based character offset.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " (at position " + std::to_string(position) + ")"),
        position(position) {}
  std::size_t position;
};

// Parsing environment. When n_modes is absent it is inferred as one more than
// the largest mode index mentioned anywhere in the text (1 if none appear).
// Named phases U(j,i) are resolved against `phases` at parse time; U(i,i)
// defaults to 1 when absent.
struct ParseOptions {
  std::optional<std::size_t> n_modes;
  std::map<std::pair<std::size_t, std::size_t>, Complex> phases;
};

namespace detail {

enum class Tok {
  LParen, RParen, LBracket, RBracket, Langle, Rangle,
  Amp, Pipe, OPlus, Arrow, SasakiArrow,
  Bang, Tilde, Question, QuestionQ,
  Semi, Star, Plus, Minus, Comma, InvOp,
  Number, Imag, Ident, End
};

struct Token {
  Tok kind;
  double value = 0.0;  // Number / Imag
  std::string text;    // Ident
  std::size_t pos = 0;
};

inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

inline std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t p = 0;
  const auto at = [&](std::size_t k) { return k < s.size() ? s[k] : '\0'; };
  while (p < s.size()) {
    const char c = s[p];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++p;
      continue;
    }
    const std::size_t start = p;
    switch (c) {
      case '(':
        if (at(p + 1) == '+' && at(p + 2) == ')') {
          out.push_back({Tok::OPlus, 0, "", start});
          p += 3;
        } else {
          out.push_back({Tok::LParen, 0, "", start});
          ++p;
        }
        continue;
      case ')': out.push_back({Tok::RParen, 0, "", start}); ++p; continue;
      case '[': out.push_back({Tok::LBracket, 0, "", start}); ++p; continue;
      case ']': out.push_back({Tok::RBracket, 0, "", start}); ++p; continue;
      case '<': out.push_back({Tok::Langle, 0, "", start}); ++p; continue;
      case '>': out.push_back({Tok::Rangle, 0, "", start}); ++p; continue;
      case '&': out.push_back({Tok::Amp, 0, "", start}); ++p; continue;
      case '|': out.push_back({Tok::Pipe, 0, "", start}); ++p; continue;
      case '!': out.push_back({Tok::Bang, 0, "", start}); ++p; continue;
      case ';': out.push_back({Tok::Semi, 0, "", start}); ++p; continue;
      case '*': out.push_back({Tok::Star, 0, "", start}); ++p; continue;
      case '+': out.push_back({Tok::Plus, 0, "", start}); ++p; continue;
      case ',': out.push_back({Tok::Comma, 0, "", start}); ++p; continue;
      case '~':
        if (at(p + 1) == '>') {
          out.push_back({Tok::SasakiArrow, 0, "", start});
          p += 2;
        } else {
          out.push_back({Tok::Tilde, 0, "", start});
          ++p;
        }
        continue;
      case '-':
        if (at(p + 1) == '>') {
          out.push_back({Tok::Arrow, 0, "", start});
          p += 2;
        } else {
          out.push_back({Tok::Minus, 0, "", start});
          ++p;
        }
        continue;
      case '?':
        if (at(p + 1) == 'q' && !ident_char(at(p + 2))) {
          out.push_back({Tok::QuestionQ, 0, "", start});
          p += 2;
        } else {
          out.push_back({Tok::Question, 0, "", start});
          ++p;
        }
        continue;
      case '^':
        if (at(p + 1) == '-' && at(p + 2) == '1') {
          out.push_back({Tok::InvOp, 0, "", start});
          p += 3;
        } else {
          throw ParseError("expected '^-1'", start);
        }
        continue;
      default:
        break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double value = 0.0;
      const auto result = std::from_chars(s.data() + p, s.data() + s.size(), value);
      if (result.ec != std::errc{}) throw ParseError("malformed number", start);
      p = static_cast<std::size_t>(result.ptr - s.data());
      if (at(p) == 'i' && !ident_char(at(p + 1))) {
        out.push_back({Tok::Imag, value, "", start});
        ++p;
      } else {
        out.push_back({Tok::Number, value, "", start});
      }
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t q = p;
      while (q < s.size() && ident_char(s[q])) ++q;
      out.push_back({Tok::Ident, 0, std::string(s.substr(p, q - p)), start});
      p = q;
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }
  out.push_back({Tok::End, 0, "", s.size()});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const ParseOptions& options)
      : toks_(std::move(tokens)), options_(options) {
    n_modes_ = options.n_modes ? *options.n_modes : infer_n_modes();
    if (n_modes_ > kMaxModes) throw ParseError("mode count exceeds the supported cap", 0);
  }

  FormulaPtr formula() {
    FormulaPtr f = parse_impl();
    expect_end();
    return f;
  }

  ActionPtr action() {
    ActionPtr a = parse_union();
    expect_end();
    return a;
  }

  OperatorExpr opexpr() {
    OperatorExpr e = parse_sum();
    expect_end();
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t k = pos_ + ahead;
    return k < toks_.size() ? toks_[k] : toks_.back();
  }
  const Token& eat() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    eat();
    return true;
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) throw ParseError(std::string("expected ") + what, peek().pos);
    return eat();
  }
  void expect_end() {
    if (peek().kind != Tok::End) throw ParseError("unexpected trailing input", peek().pos);
  }
  bool ident_is(const char* name, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Ident && peek(ahead).text == name;
  }

  // Largest mode index mentioned in a(k) / adag(k) / U(j,i), plus one.
  std::size_t infer_n_modes() const {
    std::size_t max_index = 0;
    bool saw = false;
    for (std::size_t k = 0; k + 2 < toks_.size(); ++k) {
      const Token& t = toks_[k];
      if (t.kind != Tok::Ident || (t.text != "a" && t.text != "adag" && t.text != "U")) continue;
      if (toks_[k + 1].kind != Tok::LParen) continue;
      for (std::size_t j = k + 2; j < toks_.size(); ++j) {
        if (toks_[j].kind == Tok::Number) {
          max_index = std::max(max_index, static_cast<std::size_t>(toks_[j].value));
          saw = true;
        } else if (toks_[j].kind != Tok::Comma) {
          break;
        }
      }
    }
    return saw ? max_index + 1 : 1;
  }

  std::size_t parse_nat(const char* what) {
    const Token& t = expect(Tok::Number, what);
    const double v = t.value;
    if (v < 0.0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw ParseError(std::string(what) + std::string(" must be a natural number"), t.pos);
    }
    return static_cast<std::size_t>(v);
  }

  ModeIndex parse_mode_index() {
    const std::size_t pos = peek().pos;
    const std::size_t idx = parse_nat("mode index");
    if (idx >= n_modes_) throw ParseError("mode index exceeds the mode count", pos);
    return idx;
  }

  // ---- formulas ----

  FormulaPtr parse_impl() {
    FormulaPtr lhs = parse_orf();
    if (accept(Tok::Arrow)) return make_implies(std::move(lhs), parse_impl());
    if (accept(Tok::SasakiArrow)) return make_sasaki(std::move(lhs), parse_impl());
    return lhs;
  }

  FormulaPtr parse_orf() {
    FormulaPtr lhs = parse_andf();
    while (true) {
      if (accept(Tok::Pipe)) {
        lhs = make_or(std::move(lhs), parse_andf());
      } else if (accept(Tok::OPlus)) {
        lhs = make_qor(std::move(lhs), parse_andf());
      } else {
        return lhs;
      }
    }
  }

  FormulaPtr parse_andf() {
    FormulaPtr lhs = parse_unary();
    while (accept(Tok::Amp)) lhs = make_and(std::move(lhs), parse_unary());
    return lhs;
  }

  FormulaPtr parse_unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Ident:
        if (t.text == "T") {
          eat();
          return make_top();
        }
        if (t.text == "F") {
          eat();
          return make_bot();
        }
        throw ParseError("expected a formula", t.pos);
      case Tok::Bang:
        eat();
        return make_not(parse_unary());
      case Tok::Tilde:
        eat();
        return make_qnot(parse_unary());
      case Tok::LBracket: {
        eat();
        ActionPtr a = parse_union();
        expect(Tok::RBracket, "']'");
        return make_box(std::move(a), parse_unary());
      }
      case Tok::Langle: {
        eat();
        ActionPtr a = parse_union();
        expect(Tok::Rangle, "'>'");
        return make_diamond(std::move(a), parse_unary());
      }
      case Tok::LParen: {
        eat();
        FormulaPtr f = parse_impl();
        expect(Tok::RParen, "')'");
        return f;
      }
      default:
        throw ParseError("expected a formula", t.pos);
    }
  }

  // ---- actions ----

  ActionPtr parse_union() {
    ActionPtr lhs = parse_seq();
    while (ident_is("U")) {
      eat();
      lhs = make_union(std::move(lhs), parse_seq());
    }
    return lhs;
  }

  ActionPtr parse_seq() {
    ActionPtr lhs = parse_post();
    while (accept(Tok::Semi)) lhs = make_seq(std::move(lhs), parse_post());
    return lhs;
  }

  ActionPtr parse_post() {
    ActionPtr a = parse_prim();
    while (accept(Tok::InvOp)) a = make_inverse(std::move(a));
    return a;
  }

  ActionPtr parse_prim() {
    if (ident_is("h") && peek(1).kind == Tok::LParen) {
      eat();
      eat();
      OperatorExpr op = parse_sum();
      expect(Tok::RParen, "')'");
      return make_basic(std::move(op));
    }
    // A test is a full formula followed by '?' or '?q'; on failure fall back
    // to a parenthesized action. Report whichever attempt got further.
    const std::size_t save = pos_;
    std::optional<ParseError> formula_error;
    try {
      FormulaPtr f = parse_impl();
      if (accept(Tok::Question)) return make_test(std::move(f));
      if (accept(Tok::QuestionQ)) return make_qtest(std::move(f));
      throw ParseError("expected '?' or '?q' after a test formula", peek().pos);
    } catch (const ParseError& e) {
      formula_error = e;
      pos_ = save;
    }
    if (peek().kind == Tok::LParen) {
      try {
        eat();
        ActionPtr a = parse_union();
        expect(Tok::RParen, "')'");
        return a;
      } catch (const ParseError& e) {
        throw e.position >= formula_error->position ? e : *formula_error;
      }
    }
    ParseError here("expected an action", peek().pos);
    throw here.position >= formula_error->position ? here : *formula_error;
  }

  // ---- operator expressions ----

  OperatorExpr parse_sum() {
    OperatorExpr e = parse_prod();
    while (accept(Tok::Plus)) e = e + parse_prod();
    return e;
  }

  bool atomop_ahead() const {
    return peek().kind == Tok::LParen || ident_is("a") || ident_is("adag") || ident_is("id") ||
           ident_is("zero");
  }

  OperatorExpr parse_prod() {
    std::optional<Complex> scalar = try_parse_scalar();
    OperatorExpr e = parse_atomop();
    while (true) {
      if (accept(Tok::Star)) {
        e = e * parse_atomop();
      } else if (atomop_ahead()) {
        e = e * parse_atomop();
      } else {
        break;
      }
    }
    return scalar ? *scalar * e : e;
  }

  // Complex literal, possibly parenthesized (the canonical printer wraps
  // coefficients in parentheses), or exp(i*r), or a named phase U(j,i).
  std::optional<Complex> try_parse_scalar() {
    const Token& t = peek();
    if (t.kind == Tok::LParen) {
      // Parenthesized scalar only when the parenthesis encloses exactly a
      // complex literal; otherwise it is a parenthesized operator.
      const std::size_t save = pos_;
      eat();
      std::optional<Complex> inner = try_parse_literal();
      if (inner && accept(Tok::RParen)) return inner;
      pos_ = save;
      return std::nullopt;
    }
    if (ident_is("exp") && peek(1).kind == Tok::LParen) {
      eat();
      eat();
      if (!ident_is("i")) throw ParseError("expected 'i*' in exp scalar", peek().pos);
      eat();
      expect(Tok::Star, "'*'");
      const bool negate = accept(Tok::Minus);
      const double angle = expect(Tok::Number, "a real angle").value;
      expect(Tok::RParen, "')'");
      return std::polar(1.0, negate ? -angle : angle);
    }
    if (ident_is("U") && peek(1).kind == Tok::LParen) {
      const std::size_t pos = peek().pos;
      eat();
      eat();
      const std::size_t j = parse_mode_index();
      expect(Tok::Comma, "','");
      const std::size_t i = parse_mode_index();
      expect(Tok::RParen, "')'");
      const auto it = options_.phases.find({j, i});
      if (it != options_.phases.end()) return it->second;
      if (i == j) return Complex{1.0, 0.0};
      throw ParseError("named phase has no binding", pos);
    }
    return try_parse_literal();
  }

  std::optional<Complex> try_parse_literal() {
    double sign = 1.0;
    std::size_t save = pos_;
    if (peek().kind == Tok::Minus &&
        (peek(1).kind == Tok::Number || peek(1).kind == Tok::Imag)) {
      sign = -1.0;
      eat();
    }
    const Token& t = peek();
    if (t.kind == Tok::Imag) {
      eat();
      return Complex{0.0, sign * t.value};
    }
    if (t.kind != Tok::Number) {
      pos_ = save;
      return std::nullopt;
    }
    eat();
    const double re = sign * t.value;
    // Optional contiguous imaginary part: "0.5+0.5i" / "0.5-0.5i".
    if ((peek().kind == Tok::Plus || peek().kind == Tok::Minus) &&
        peek(1).kind == Tok::Imag) {
      const double im_sign = peek().kind == Tok::Minus ? -1.0 : 1.0;
      eat();
      const Token& im = eat();
      return Complex{re, im_sign * im.value};
    }
    return Complex{re, 0.0};
  }

  OperatorExpr parse_atomop() {
    const Token& t = peek();
    if (t.kind == Tok::LParen) {
      eat();
      OperatorExpr e = parse_sum();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "a" && peek(1).kind == Tok::LParen) {
        eat();
        eat();
        const ModeIndex i = parse_mode_index();
        expect(Tok::RParen, "')'");
        return annihilation(i, n_modes_);
      }
      if (t.text == "adag" && peek(1).kind == Tok::LParen) {
        eat();
        eat();
        const ModeIndex i = parse_mode_index();
        expect(Tok::RParen, "')'");
        return creation(i, n_modes_);
      }
      if (t.text == "id") {
        eat();
        return OperatorExpr::identity(n_modes_);
      }
      if (t.text == "zero") {
        eat();
        return OperatorExpr::zero(n_modes_);
      }
    }
    throw ParseError("expected an operator", t.pos);
  }

  std::vector<Token> toks_;
  ParseOptions options_;
  std::size_t n_modes_ = 1;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline FormulaPtr parse_formula(std::string_view text, const ParseOptions& options = {}) {
  return detail::Parser(detail::lex(text), options).formula();
}

inline ActionPtr parse_action(std::string_view text, const ParseOptions& options = {}) {
  return detail::Parser(detail::lex(text), options).action();
}

inline OperatorExpr parse_opexpr(std::string_view text, const ParseOptions& options = {}) {
  return detail::Parser(detail::lex(text), options).opexpr();
}

// Shortest decimal form that round-trips through the lexer.
inline std::string format_real(double v) {
  char buf[40];
  const auto result = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, result.ptr);
}

// "2", "1.5i", "0.5-0.25i": always re-parseable as a complex literal.
inline std::string format_complex(Complex c) {
  if (c.imag() == 0.0) return format_real(c.real());
  if (c.real() == 0.0) return format_real(c.imag()) + "i";
  return format_real(c.real()) + (c.imag() < 0.0 ? "-" : "+") + format_real(std::abs(c.imag())) +
         "i";
}

// Canonical surface form: terms joined by " + ", coefficients other than 1
// parenthesized, creators before annihilators. Examples: "zero", "id",
// "id + (-1) adag(0) a(0)", "(0.5+0.5i) adag(1) a(0)".
inline std::string to_string(const OperatorExpr& e) {
  if (e.is_zero()) return "zero";
  std::string out;
  for (const NormalTerm& t : e.terms()) {
    if (!out.empty()) out += " + ";
    std::string atoms;
    for (ModeIndex c : t.creators) {
      if (!atoms.empty()) atoms += ' ';
      atoms += "adag(" + std::to_string(c) + ")";
    }
    for (ModeIndex d : t.annihilators) {
      if (!atoms.empty()) atoms += ' ';
      atoms += "a(" + std::to_string(d) + ")";
    }
    if (t.coeff == Complex{1.0, 0.0}) {
      out += atoms.empty() ? "id" : atoms;
    } else {
      out += "(" + format_complex(t.coeff) + ")";
      out += atoms.empty() ? " id" : (" " + atoms);
    }
  }
  return out;
}

namespace detail {

std::string print_formula(const Formula& f, int min_prec);
std::string print_action(const Action& a, int min_prec);

inline std::string print_action(const Action& a, int min_prec) {
  int prec = 4;
  std::string body;
  switch (a.kind) {
    case ActionKind::Basic:
      body = "h(" + to_string(*a.op) + ")";
      break;
    case ActionKind::ClassicalTest:
      body = print_formula(*a.test, 0) + "?";
      break;
    case ActionKind::QuantumTest:
      body = print_formula(*a.test, 0) + "?q";
      break;
    case ActionKind::Inverse:
      prec = 3;
      body = print_action(*a.left, 3) + "^-1";
      break;
    case ActionKind::Seq:
      prec = 2;
      body = print_action(*a.left, 2) + " ; " + print_action(*a.right, 3);
      break;
    case ActionKind::Union:
      prec = 1;
      body = print_action(*a.left, 1) + " U " + print_action(*a.right, 2);
      break;
  }
  return prec < min_prec ? "(" + body + ")" : body;
}

inline std::string print_formula(const Formula& f, int min_prec) {
  int prec = 4;
  std::string body;
  switch (f.kind) {
    case FormulaKind::Top: body = "T"; break;
    case FormulaKind::Bot: body = "F"; break;
    case FormulaKind::ClassicalNot: body = "!" + print_formula(*f.left, 4); break;
    case FormulaKind::QuantumNot: body = "~" + print_formula(*f.left, 4); break;
    case FormulaKind::Box:
      body = "[" + print_action(*f.action, 0) + "]" + print_formula(*f.left, 4);
      break;
    case FormulaKind::Diamond:
      body = "<" + print_action(*f.action, 0) + ">" + print_formula(*f.left, 4);
      break;
    case FormulaKind::And:
      prec = 3;
      body = print_formula(*f.left, 3) + " & " + print_formula(*f.right, 4);
      break;
    case FormulaKind::ClassicalOr:
      prec = 2;
      body = print_formula(*f.left, 2) + " | " + print_formula(*f.right, 3);
      break;
    case FormulaKind::QuantumOr:
      prec = 2;
      body = print_formula(*f.left, 2) + " (+) " + print_formula(*f.right, 3);
      break;
    case FormulaKind::Implies:
      prec = 1;
      body = print_formula(*f.left, 2) + " -> " + print_formula(*f.right, 1);
      break;
    case FormulaKind::SasakiHook:
      prec = 1;
      body = print_formula(*f.left, 2) + " ~> " + print_formula(*f.right, 1);
      break;
  }
  return prec < min_prec ? "(" + body + ")" : body;
}

}  // namespace detail

inline std::string pretty_print(const FormulaPtr& f) {
  if (!f) throw std::invalid_argument("cannot print a null formula");
  return detail::print_formula(*f, 0);
}

inline std::string pretty_print(const ActionPtr& a) {
  if (!a) throw std::invalid_argument("cannot print a null action");
  return detail::print_action(*a, 0);
}

// How h turns an operator into an action: either one forward application of
// the whole expression, or (for a single product term) a chain of one-atom
// steps executed right to left, matching operator composition order.
enum class HMode { Atomic, MonomialSequence };

inline ActionPtr compile_h(const OperatorExpr& op, HMode mode = HMode::Atomic) {
  if (mode == HMode::Atomic) return make_basic(op);
  if (op.terms().size() != 1) {
    throw std::invalid_argument("monomial-sequence compilation needs a single product term");
  }
  const NormalTerm& t = op.terms()[0];
  const std::vector<OperatorAtom> word = t.word();
  if (word.empty()) return make_basic(op);  // scaled identity

  ActionPtr chain;
  bool first = true;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {  // rightmost acts first
    const Complex c = first ? t.coeff : Complex{1.0, 0.0};
    ActionPtr step = make_basic(OperatorExpr::from_word(c, {*it}, op.n_modes()));
    chain = first ? std::move(step) : make_seq(std::move(chain), std::move(step));
    first = false;
  }
  return chain;
}

}  // namespace fockdl
