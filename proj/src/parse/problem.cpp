#include "varinv/parse/problem.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>

namespace varinv::parse {

using jet::Expr;
using jet::JetVar;
using jet::MultiIndex;
using jet::Rational;
using jet::SpacePtr;

std::string_view kind_keyword(Kind kind) {
  switch (kind) {
    case Kind::System: return "system";
    case Kind::Lagrangian: return "lagrangian";
    case Kind::MechField: return "mech-field";
    case Kind::MechForm: return "mech-form";
  }
  return "system";
}

ParseError::ParseError(ErrorKind kind, int line, int column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      kind_(kind),
      line_(line),
      column_(column),
      detail_(message) {}

bool operator==(const ProblemFile& a, const ProblemFile& b) {
  if (a.kind != b.kind || a.name != b.name || a.body != b.body) return false;
  if (!a.space || !b.space) return a.space == b.space;
  return *a.space == *b.space;
}

std::size_t packed_index(int d, int j, int k) {
  // Row j starts after rows 0..j-1, which hold (d-1) + ... + (d-j) entries.
  return static_cast<std::size_t>(j * d - j * (j + 1) / 2 + (k - j - 1));
}

ProblemFile make_problem(Kind kind, std::string name, const SpacePtr& space,
                         std::vector<Expr> body) {
  int k = 0;
  for (const auto& e : body) k = std::max(k, e.max_order());
  auto final_space = jet::with_order(space, k);
  for (auto& e : body) e = e.in_space(final_space);
  return ProblemFile{kind, std::move(name), final_space, std::move(body)};
}

namespace {

enum class Tok {
  Ident,     // text = name
  VarRef,    // text = name, suffix = letters
  UInt,
  Punct,     // text = the character, or "mech-field"-style never here
  End,
};

struct Token {
  Tok type;
  std::string text;
  std::string suffix;
  int line;
  int column;
  int suffix_column = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", "", line_, col_});
        return out;
      }
      const char c = src_[pos_];
      const int line = line_;
      const int col = col_;
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::string name;
        while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_])))
          name += advance();
        if (pos_ < src_.size() && src_[pos_] == '_') {
          advance();
          const int scol = col_;
          std::string suffix;
          while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_])))
            suffix += advance();
          if (suffix.empty())
            throw ParseError(ErrorKind::Lexical, line_, col_,
                             "expected derivative letters after '_'");
          if (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                                     src_[pos_] == '_'))
            throw ParseError(ErrorKind::Lexical, line_, col_,
                             "unexpected character in derivative suffix");
          Token t{Tok::VarRef, name, suffix, line, col};
          t.suffix_column = scol;
          out.push_back(t);
        } else {
          out.push_back({Tok::Ident, name, "", line, col});
        }
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string digits;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
          digits += advance();
        if (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_])))
          throw ParseError(ErrorKind::Lexical, line_, col_,
                           "unexpected letter after number (use '*' for products)");
        out.push_back({Tok::UInt, digits, "", line, col});
      } else if (std::string_view("{}:;,+-*/^()").find(c) != std::string_view::npos) {
        advance();
        out.push_back({Tok::Punct, std::string(1, c), "", line, col});
      } else {
        std::string shown = (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f)
                                ? "byte 0x" + hex(static_cast<unsigned char>(c))
                                : std::string("'") + c + "'";
        throw ParseError(ErrorKind::Lexical, line, col, "unexpected character " + shown);
      }
    }
  }

 private:
  static std::string hex(unsigned char c) {
    static const char* digits = "0123456789abcdef";
    return {digits[c >> 4U], digits[c & 15U]};
  }

  char advance() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  ProblemFile file() {
    const Kind kind = kind_header();
    const Token& name = expect_ident("problem name");
    expect("{");
    declarations();
    auto body = body_entries(kind);
    expect("}");
    if (peek().type != Tok::End) fail(ErrorKind::Syntax, peek(), "unexpected input after '}'");
    return make_problem(kind, name.text, space_, std::move(body));
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }
  bool at(std::string_view punct) const {
    return peek().type == Tok::Punct && peek().text == punct;
  }

  [[noreturn]] static void fail(ErrorKind kind, const Token& t, const std::string& msg) {
    throw ParseError(kind, t.line, t.column, msg);
  }

  static std::string describe(const Token& t) {
    switch (t.type) {
      case Tok::End: return "end of input";
      case Tok::VarRef: return "'" + t.text + "_" + t.suffix + "'";
      default: return "'" + t.text + "'";
    }
  }

  const Token& expect(std::string_view punct) {
    if (!at(punct))
      fail(ErrorKind::Syntax, peek(),
           "expected '" + std::string(punct) + "' but found " + describe(peek()));
    return next();
  }

  const Token& expect_ident(const std::string& what) {
    if (peek().type != Tok::Ident)
      fail(ErrorKind::Syntax, peek(), "expected " + what + " but found " + describe(peek()));
    return next();
  }

  void expect_keyword(std::string_view kw) {
    if (peek().type != Tok::Ident || peek().text != kw)
      fail(ErrorKind::Syntax, peek(),
           "expected '" + std::string(kw) + "' but found " + describe(peek()));
    next();
  }

  Kind kind_header() {
    const Token& t = expect_ident("problem kind");
    if (t.text == "system") return Kind::System;
    if (t.text == "lagrangian") return Kind::Lagrangian;
    if (t.text == "mech") {
      expect("-");
      const Token& sub = expect_ident("'field' or 'form'");
      if (sub.text == "field") return Kind::MechField;
      if (sub.text == "form") return Kind::MechForm;
      fail(ErrorKind::Syntax, sub, "unknown problem kind 'mech-" + sub.text + "'");
    }
    fail(ErrorKind::Syntax, t, "unknown problem kind '" + t.text + "'");
  }

  std::vector<std::string> ident_list(std::vector<const Token*>& where) {
    std::vector<std::string> names;
    if (at(";")) return names;
    while (true) {
      const Token& t = expect_ident("variable name");
      names.push_back(t.text);
      where.push_back(&t);
      if (!at(",")) break;
      next();
    }
    return names;
  }

  void declarations() {
    std::vector<const Token*> where;
    expect_keyword("independent");
    expect(":");
    auto indep = ident_list(where);
    expect(";");
    expect_keyword("dependent");
    expect(":");
    auto dep = ident_list(where);
    expect(";");
    std::map<std::string, const Token*> seen;
    for (const Token* t : where) {
      if (seen.count(t->text))
        fail(ErrorKind::Duplicate, *t, "duplicate declaration of '" + t->text + "'");
      seen[t->text] = t;
    }
    for (std::size_t i = 0; i < indep.size(); ++i)
      if (indep[i].size() != 1)
        fail(ErrorKind::Semantic, *where[i],
             "independent variable '" + indep[i] + "' must be a single letter");
    if (dep.empty()) fail(ErrorKind::Semantic, peek(), "at least one dependent variable is required");
    for (std::size_t i = 0; i < indep.size(); ++i) indep_index_[indep[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < dep.size(); ++i) dep_index_[dep[i]] = static_cast<int>(i);
    // Order grows while parsing; the final space is trimmed by make_problem.
    space_ = jet::make_space(indep, dep, indep.empty() ? 0 : 64);
  }

  std::vector<Expr> body_entries(Kind kind) {
    const int l = space_->l();
    std::vector<std::optional<Expr>> slots;
    std::vector<Expr> equations;
    if (kind == Kind::MechField) slots.resize(l);
    if (kind == Kind::MechForm) slots.resize(static_cast<std::size_t>(l * (l - 1) / 2));
    if (kind == Kind::MechField || kind == Kind::MechForm) {
      if (space_->n() != 0)
        fail(ErrorKind::Semantic, peek(), "mechanics files take an empty 'independent' list");
    }

    bool any = false;
    while (!at("}") && peek().type != Tok::End) {
      any = true;
      const Token& key = expect_ident("entry key");
      switch (kind) {
        case Kind::System: {
          if (key.text != "eq") fail(ErrorKind::Syntax, key, "system entries use the key 'eq'");
          expect(":");
          equations.push_back(expr());
          if (static_cast<int>(equations.size()) > l)
            fail(ErrorKind::Semantic, key,
                 "more equations than dependent variables (" + std::to_string(l) + ")");
          break;
        }
        case Kind::Lagrangian: {
          if (key.text != "L") fail(ErrorKind::Syntax, key, "lagrangian entries use the key 'L'");
          if (!equations.empty()) fail(ErrorKind::Duplicate, key, "duplicate Lagrangian density");
          expect(":");
          equations.push_back(expr());
          break;
        }
        case Kind::MechField: {
          auto it = dep_index_.find(key.text);
          if (it == dep_index_.end())
            fail(ErrorKind::UnknownIdentifier, key, "unknown coordinate '" + key.text + "'");
          if (slots[it->second])
            fail(ErrorKind::Duplicate, key, "duplicate component for '" + key.text + "'");
          expect(":");
          slots[it->second] = expr();
          break;
        }
        case Kind::MechForm: {
          auto a = dep_index_.find(key.text);
          if (a == dep_index_.end())
            fail(ErrorKind::UnknownIdentifier, key, "unknown coordinate '" + key.text + "'");
          expect("^");
          const Token& second = expect_ident("coordinate name");
          auto b = dep_index_.find(second.text);
          if (b == dep_index_.end())
            fail(ErrorKind::UnknownIdentifier, second, "unknown coordinate '" + second.text + "'");
          if (a->second == b->second)
            fail(ErrorKind::Semantic, second, "a two-form has no diagonal entries");
          expect(":");
          Expr value = expr();
          int j = a->second;
          int k = b->second;
          if (j > k) {
            std::swap(j, k);
            value = -value;
          }
          auto& slot = slots[packed_index(l, j, k)];
          if (slot)
            fail(ErrorKind::Duplicate, key,
                 "duplicate entry for '" + key.text + "^" + second.text + "'");
          slot = std::move(value);
          break;
        }
      }
      expect(";");
    }
    if (!any) fail(ErrorKind::Syntax, peek(), "expected at least one body entry");

    if (kind == Kind::System) {
      if (static_cast<int>(equations.size()) != l)
        fail(ErrorKind::Semantic, peek(),
             "expected " + std::to_string(l) + " equations, found " + std::to_string(equations.size()));
      return equations;
    }
    if (kind == Kind::Lagrangian) return equations;
    std::vector<Expr> out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (slots[i]) {
        out.push_back(*slots[i]);
      } else if (kind == Kind::MechField) {
        fail(ErrorKind::Semantic, peek(),
             "missing component for coordinate '" + space_->dependents[i] + "'");
      } else {
        out.emplace_back(space_);
      }
    }
    return out;
  }

  Expr expr() {
    Expr e = term();
    while (at("+") || at("-")) {
      const bool minus = next().text == "-";
      Expr t = term();
      e = minus ? e - t : e + t;
    }
    return e;
  }

  Expr term() {
    Expr e = factor();
    while (true) {
      if (at("*")) {
        next();
        e = e * factor();
      } else if (at("/")) {
        fail(ErrorKind::NonPolynomial, peek(),
             "non-polynomial construct: division is only allowed inside rational literals p/q");
      } else {
        return e;
      }
    }
  }

  Expr factor() {
    Expr base = atom();
    if (at("^")) {
      next();
      if (peek().type != Tok::UInt) {
        if (at("-") || peek().type == Tok::Ident || peek().type == Tok::VarRef || at("("))
          fail(ErrorKind::NonPolynomial, peek(),
               "non-polynomial construct: exponents must be nonnegative integer literals");
        fail(ErrorKind::Syntax, peek(), "expected exponent but found " + describe(peek()));
      }
      const Token& t = next();
      if (t.text.size() > 4) fail(ErrorKind::Semantic, t, "exponent too large");
      base = base.pow(static_cast<unsigned>(std::stoul(t.text)));
    }
    return base;
  }

  Expr atom() {
    const Token& t = peek();
    if (t.type == Tok::UInt) {
      next();
      mpz_class num(t.text);
      if (at("/")) {
        next();
        if (peek().type != Tok::UInt)
          fail(ErrorKind::NonPolynomial, peek(),
               "non-polynomial construct: division by a non-literal");
        const Token& d = next();
        mpz_class den(d.text);
        if (den == 0) fail(ErrorKind::Semantic, d, "zero denominator in rational literal");
        Rational r(num, den);
        r.canonicalize();
        if (at("/"))
          fail(ErrorKind::NonPolynomial, peek(),
               "non-polynomial construct: division is only allowed inside rational literals p/q");
        return Expr::constant(space_, r);
      }
      return Expr::constant(space_, Rational(num));
    }
    if (t.type == Tok::VarRef || t.type == Tok::Ident) {
      next();
      return variable(t);
    }
    if (at("(")) {
      next();
      Expr e = expr();
      expect(")");
      return e;
    }
    if (at("-")) {
      next();
      return -factor();
    }
    fail(ErrorKind::Syntax, t, "expected an expression but found " + describe(t));
  }

  Expr variable(const Token& t) {
    if (auto it = indep_index_.find(t.text); it != indep_index_.end()) {
      if (t.type == Tok::VarRef)
        fail(ErrorKind::Semantic, t,
             "derivative suffix on independent variable '" + t.text + "'");
      return Expr::variable(space_, JetVar::independent(it->second));
    }
    auto it = dep_index_.find(t.text);
    if (it == dep_index_.end())
      fail(ErrorKind::UnknownIdentifier, t, "unknown identifier '" + t.text + "'");
    std::vector<int> idx;
    for (std::size_t i = 0; i < t.suffix.size(); ++i) {
      const std::string letter(1, t.suffix[i]);
      auto j = indep_index_.find(letter);
      if (j == indep_index_.end())
        throw ParseError(ErrorKind::UnknownIdentifier, t.line,
                         t.suffix_column + static_cast<int>(i),
                         "unknown independent variable '" + letter + "' in derivative suffix");
      idx.push_back(j->second);
    }
    if (static_cast<int>(idx.size()) > space_->order)
      fail(ErrorKind::Semantic, t, "derivative order too large");
    return Expr::variable(space_, JetVar::jet(it->second, MultiIndex(std::move(idx))));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  SpacePtr space_;
  std::map<std::string, int> indep_index_;
  std::map<std::string, int> dep_index_;
};

std::string join(const std::vector<std::string>& names) {
  std::string s;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) s += ", ";
    s += names[i];
  }
  return s;
}

}  // namespace

ProblemFile parse_problem(std::string_view text) {
  Parser parser(Lexer(text).run());
  return parser.file();
}

std::string render_expr(const Expr& e) {
  if (e.is_zero()) return "0";
  std::string out;
  bool first = true;
  const auto& space = *e.space();
  for (auto it = e.terms().rbegin(); it != e.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    const bool negative = c < 0;
    if (first) {
      if (negative) out += '-';
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    const Rational mag = abs(c);
    std::string body;
    for (const auto& [v, p] : m.factors()) {
      if (!body.empty()) body += '*';
      body += jet::var_name(space, v);
      if (p > 1) body += "^" + std::to_string(p);
    }
    if (body.empty()) {
      out += mag.get_str();
    } else if (mag == 1) {
      out += body;
    } else {
      out += mag.get_str() + "*" + body;
    }
  }
  return out;
}

std::string render(const ProblemFile& p) {
  std::ostringstream os;
  os << kind_keyword(p.kind) << ' ' << p.name << " {\n";
  os << "  independent: " << join(p.space->independents) << ";\n";
  os << "  dependent: " << join(p.space->dependents) << ";\n";
  const auto& deps = p.space->dependents;
  switch (p.kind) {
    case Kind::System:
      for (const auto& e : p.body) os << "  eq: " << render_expr(e) << ";\n";
      break;
    case Kind::Lagrangian:
      os << "  L: " << render_expr(p.body.at(0)) << ";\n";
      break;
    case Kind::MechField:
      for (std::size_t i = 0; i < p.body.size(); ++i)
        os << "  " << deps[i] << ": " << render_expr(p.body[i]) << ";\n";
      break;
    case Kind::MechForm: {
      const int d = p.space->l();
      bool any = false;
      for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
          const auto& e = p.body.at(packed_index(d, j, k));
          if (e.is_zero()) continue;
          any = true;
          os << "  " << deps[j] << '^' << deps[k] << ": " << render_expr(e) << ";\n";
        }
      if (!any && d >= 2) os << "  " << deps[0] << '^' << deps[1] << ": 0;\n";
      break;
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace varinv::parse
