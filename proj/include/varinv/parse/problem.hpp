#pragma once

// Text format for jet spaces, source forms, Lagrangians and mechanics inputs.
//
//   file       := kindheader '{' decls body '}'
//   kindheader := ('system'|'lagrangian'|'mech-field'|'mech-form') IDENT
//   decls      := 'independent' ':' identlist ';' 'dependent' ':' identlist ';'
//   body       := (key ':' expr ';')+
//   expr       := term (('+'|'-') term)*
//   term       := factor ('*' factor)*
//   factor     := atom ('^' UINT)?
//   atom       := UINT ('/' UINT)? | VARREF | '(' expr ')' | '-' factor
//   VARREF     := IDENT ('_' SUFFIXLETTERS)?
//
// Keys: 'eq' (system, one per dependent), 'L' (lagrangian), a coordinate name
// (mech-field), 'a^b' for the da^db coefficient (mech-form).

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "varinv/jet/expr.hpp"

namespace varinv::parse {

enum class Kind { System, Lagrangian, MechField, MechForm };

std::string_view kind_keyword(Kind kind);

enum class ErrorKind {
  Lexical,
  Syntax,
  UnknownIdentifier,
  NonPolynomial,
  Duplicate,
  Semantic,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ErrorKind kind, int line, int column, const std::string& message);

  ErrorKind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }
  /// Message without the position prefix.
  const std::string& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  int line_;
  int column_;
  std::string detail_;
};

/// Body layout by kind:
///   System     - one Expr per dependent variable
///   Lagrangian - a single density
///   MechField  - one component per coordinate
///   MechForm   - upper triangle (j < k, row-major) of the coefficient matrix
struct ProblemFile {
  Kind kind = Kind::System;
  std::string name;
  jet::SpacePtr space;
  std::vector<jet::Expr> body;

  friend bool operator==(const ProblemFile& a, const ProblemFile& b);
};

/// Builds a ProblemFile whose space order is the maximum order in the body.
ProblemFile make_problem(Kind kind, std::string name, const jet::SpacePtr& space,
                         std::vector<jet::Expr> body);

ProblemFile parse_problem(std::string_view text);

std::string render(const ProblemFile& p);
std::string render_expr(const jet::Expr& e);

/// Index into the packed upper triangle of a d x d antisymmetric matrix.
std::size_t packed_index(int d, int j, int k);

}  // namespace varinv::parse
