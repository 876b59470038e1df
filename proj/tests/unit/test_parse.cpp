#include "doctest.h"

#include <random>

#include "random_problem.hpp"
#include "varinv/parse/problem.hpp"

using namespace varinv;
using namespace varinv::parse;
using jet::Expr;
using jet::JetVar;
using jet::MultiIndex;

namespace {

ParseError parse_error(std::string_view text) {
  try {
    parse_problem(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error");
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("parse the wave system") {
  auto p = parse_problem("system wave { independent: t, x; dependent: u; eq: u_tt - u_xx; }");
  CHECK(p.kind == Kind::System);
  CHECK(p.name == "wave");
  CHECK(p.space->n() == 2);
  CHECK(p.space->l() == 1);
  CHECK(p.space->order == 2);
  REQUIRE(p.body.size() == 1);
  auto utt = Expr::variable(p.space, JetVar::jet(0, MultiIndex({0, 0})));
  auto uxx = Expr::variable(p.space, JetVar::jet(0, MultiIndex({1, 1})));
  CHECK(p.body[0] == utt - uxx);
}

TEST_CASE("parse a Lagrangian with a rational coefficient") {
  auto p = parse_problem("lagrangian free { independent: x; dependent: u; L: 1/2*u_x^2; }");
  CHECK(p.kind == Kind::Lagrangian);
  CHECK(p.space->order == 1);
  auto ux = Expr::variable(p.space, JetVar::jet(0, MultiIndex({0})));
  CHECK(p.body.at(0) == jet::Rational(1, 2) * ux.pow(2));
}

TEST_CASE("derivative suffixes are sorted on ingestion") {
  auto a = parse_problem("system s { independent: t, x; dependent: u; eq: u_xt; }");
  auto b = parse_problem("system s { independent: t, x; dependent: u; eq: u_tx; }");
  CHECK(a == b);
  CHECK(render_expr(a.body[0]) == "u_tx");
}

TEST_CASE("unknown derivative letter is reported at the letter") {
  auto e = parse_error("system bad { independent: x; dependent: u; eq: u_y; }");
  CHECK(e.kind() == ErrorKind::UnknownIdentifier);
  CHECK(e.detail() == "unknown independent variable 'y' in derivative suffix");
  CHECK(e.line() == 1);
  CHECK(e.column() == 50);
}

TEST_CASE("error kinds carry positions inside the offending token") {
  SUBCASE("lexical") {
    auto e = parse_error("system s {\n  independent: x;\n  dependent: u;\n  eq: u $ 2;\n}");
    CHECK(e.kind() == ErrorKind::Lexical);
    CHECK(e.line() == 4);
    CHECK(e.column() == 9);
  }
  SUBCASE("unknown identifier") {
    auto e = parse_error("system s { independent: x; dependent: u; eq: v; }");
    CHECK(e.kind() == ErrorKind::UnknownIdentifier);
    CHECK(e.column() == 46);
  }
  SUBCASE("division by a variable") {
    auto e = parse_error("system s { independent: x; dependent: u; eq: 1/u; }");
    CHECK(e.kind() == ErrorKind::NonPolynomial);
    CHECK(e.column() == 48);
  }
  SUBCASE("division of an expression") {
    auto e = parse_error("system s { independent: x; dependent: u; eq: u/2; }");
    CHECK(e.kind() == ErrorKind::NonPolynomial);
    CHECK(e.column() == 47);
  }
  SUBCASE("symbolic exponent") {
    auto e = parse_error("system s { independent: x; dependent: u; eq: u^u; }");
    CHECK(e.kind() == ErrorKind::NonPolynomial);
  }
  SUBCASE("duplicate declaration") {
    auto e = parse_error("system s { independent: x; dependent: u, x; eq: u; eq: u; }");
    CHECK(e.kind() == ErrorKind::Duplicate);
    CHECK(e.column() == 42);
  }
  SUBCASE("missing semicolon") {
    auto e = parse_error("system s { independent: x; dependent: u; eq: u }");
    CHECK(e.kind() == ErrorKind::Syntax);
    CHECK(e.column() == 48);
  }
  SUBCASE("equation count") {
    auto e = parse_error("system s { independent: x; dependent: u, w; eq: u; }");
    CHECK(e.kind() == ErrorKind::Semantic);
  }
  SUBCASE("unknown kind") {
    auto e = parse_error("problem s { }");
    CHECK(e.kind() == ErrorKind::Syntax);
    CHECK(e.column() == 1);
  }
}

TEST_CASE("comments and whitespace are ignored") {
  auto p = parse_problem(
      "# heat equation\n"
      "system heat {\n"
      "  independent: t, x;   # time first\n"
      "  dependent: u;\n"
      "  eq: u_t\n      - u_xx;\n"
      "}\n");
  CHECK(render_expr(p.body[0]) == "u_t - u_xx");
}

TEST_CASE("unary minus binds to a factor") {
  auto p = parse_problem("system s { independent: x; dependent: u; eq: -u^2 - -1/2*u; }");
  CHECK(render_expr(p.body[0]) == "-u^2 + 1/2*u");
}

TEST_CASE("render examples") {
  auto space = jet::make_space({"x"}, {"u"}, 1);
  CHECK(render_expr(Expr(space)) == "0");
  auto u = Expr::variable(space, JetVar::jet(0));
  auto ux = Expr::variable(space, JetVar::jet(0, MultiIndex({0})));
  CHECK(render_expr(jet::Rational(-1, 2) * ux.pow(2)) == "-1/2*u_x^2");
  CHECK(render_expr(u - Expr::constant(space, 3)) == "u - 3");
  auto wave = parse_problem("system wave { independent: t, x; dependent: u; eq: u_tt - u_xx; }");
  CHECK(render(wave) ==
        "system wave {\n  independent: t, x;\n  dependent: u;\n  eq: u_tt - u_xx;\n}\n");
  CHECK(parse_problem(render(wave)) == wave);
}

TEST_CASE("mechanics files") {
  auto field = parse_problem("mech-field osc { independent: ; dependent: q, p; q: p; p: -q; }");
  CHECK(field.kind == Kind::MechField);
  CHECK(field.space->n() == 0);
  REQUIRE(field.body.size() == 2);
  CHECK(render_expr(field.body[1]) == "-q");

  auto form = parse_problem("mech-form w { independent: ; dependent: q, p; p^q: -1; }");
  REQUIRE(form.body.size() == 1);
  CHECK(render_expr(form.body[0]) == "1");
  CHECK(render(form).find("q^p: 1;") != std::string::npos);

  CHECK_THROWS_AS(parse_problem("mech-field f { independent: ; dependent: q, p; q: p; }"),
                  ParseError);
  CHECK_THROWS_AS(parse_problem("mech-form f { independent: ; dependent: q, p; q^q: 1; }"),
                  ParseError);
  CHECK_THROWS_AS(
      parse_problem("mech-form f { independent: ; dependent: q, p; q^p: 1; p^q: 2; }"),
      ParseError);
}

TEST_CASE("property: parse(render(p)) reproduces random problem files") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const ProblemFile p = testing::random_problem(rng, trial);
    const std::string text = render(p);
    INFO(text);
    CHECK(parse_problem(text) == p);
  }
}
