#include "doctest.h"

#include <algorithm>
#include <random>

#include "random_poly.hpp"
#include "varinv/jet/expr.hpp"

using namespace varinv::jet;

namespace {

struct Vars {
  SpacePtr space = make_space({"x"}, {"u"}, 2);
  Expr x = Expr::variable(space, JetVar::independent(0));
  Expr u = Expr::variable(space, JetVar::jet(0));
  Expr ux = Expr::variable(space, JetVar::jet(0, MultiIndex({0})));
  Expr uxx = Expr::variable(space, JetVar::jet(0, MultiIndex({0, 0})));
  JetVar vx = JetVar::independent(0);
  JetVar vu = JetVar::jet(0);
  JetVar vux = JetVar::jet(0, MultiIndex({0}));
  JetVar vuxx = JetVar::jet(0, MultiIndex({0, 0}));
};

}  // namespace

TEST_CASE("multi-indices are sorted and enumerate in lexicographic order") {
  CHECK(MultiIndex({1, 0}) == MultiIndex({0, 1}));
  CHECK(MultiIndex({0}).with(1).indices() == std::vector<int>{0, 1});
  CHECK(MultiIndex({1}).with(0).indices() == std::vector<int>{0, 1});
  auto two = multi_indices(2, 2);
  REQUIRE(two.size() == 3);
  CHECK(two[0].indices() == std::vector<int>{0, 0});
  CHECK(two[1].indices() == std::vector<int>{0, 1});
  CHECK(two[2].indices() == std::vector<int>{1, 1});
  CHECK(multi_indices(3, 3).size() == 10);
  CHECK(multi_indices(0, 0).size() == 1);
  CHECK(MultiIndex({0, 0, 1}).orderings() == 3);
  CHECK(MultiIndex({0, 1, 2}).orderings() == 6);
  CHECK(MultiIndex().orderings() == 1);
}

TEST_CASE("jet space validation") {
  CHECK_THROWS_AS(make_space({"x"}, {}, 1), DomainError);
  CHECK_THROWS_AS(make_space({"x"}, {"x"}, 1), DomainError);
  CHECK_THROWS_AS(make_space({"xy"}, {"u"}, 1), DomainError);
  CHECK_THROWS_AS(make_space({}, {"q"}, 1), DomainError);
  CHECK_NOTHROW(make_space({}, {"q", "p"}, 0));
}

TEST_CASE("partial_derivative examples") {
  Vars v;
  CHECK(partial_derivative(v.u * v.ux, v.vu) == v.ux);
  CHECK(partial_derivative(v.ux.pow(2), v.vux) == Rational(2) * v.ux);
  CHECK(partial_derivative(v.x * v.uxx + v.u, v.vuxx) == v.x);
  CHECK(partial_derivative(v.x * v.uxx, v.vx) == v.uxx);
  CHECK(partial_derivative(v.u, v.vux).is_zero());
}

TEST_CASE("partial_derivative rejects variables outside the space") {
  Vars v;
  CHECK_THROWS_AS(partial_derivative(v.u, JetVar::jet(1)), DomainError);
  CHECK_THROWS_AS(partial_derivative(v.u, JetVar::jet(0, MultiIndex({0, 0, 0}))), DomainError);
  CHECK_THROWS_AS(partial_derivative(v.u, JetVar::independent(3)), DomainError);
}

TEST_CASE("scale_dependent grades by jet degree") {
  Vars v;
  auto a = scale_dependent(v.uxx);
  REQUIRE(a.size() == 1);
  CHECK(a[0].first == 1);
  CHECK(a[0].second == v.uxx);

  auto b = scale_dependent(v.u * v.uxx + v.x * v.u);
  REQUIRE(b.size() == 2);
  CHECK(b[0].first == 2);
  CHECK(b[0].second == v.u * v.uxx);
  CHECK(b[1].first == 1);
  CHECK(b[1].second == v.x * v.u);

  auto c = scale_dependent(Expr::constant(v.space, 3));
  REQUIRE(c.size() == 1);
  CHECK(c[0].first == 0);
  CHECK(c[0].second == Expr::constant(v.space, 3));
}

TEST_CASE("eval_at_point examples") {
  Vars v;
  CHECK(eval_at_point(v.ux.pow(2), {{v.vux, 3}}) == 9);
  CHECK(eval_at_point(v.x * v.u - v.u, {{v.vx, 1}, {v.vu, 5}}) == 0);
  CHECK(eval_at_point(Rational(1, 2) * v.u.pow(2), {{v.vu, 3}}) == Rational(9, 2));
  CHECK_THROWS_AS(eval_at_point(v.x * v.u, {{v.vu, 1}}), DomainError);
}

TEST_CASE("zero coefficients are never stored") {
  Vars v;
  Expr e = v.u - v.u;
  CHECK(e.is_zero());
  CHECK((v.u * Rational(0)).is_zero());
  CHECK(Expr::constant(v.space, 0).is_zero());
}

TEST_CASE("graded lexicographic order ranks degree first") {
  Vars v;
  GradedLex less;
  const Monomial one;
  const Monomial u = Monomial::of(v.vu);
  const Monomial uu = Monomial::of(v.vu, 2);
  const Monomial x = Monomial::of(v.vx);
  CHECK(less(one, u));
  CHECK(less(u, uu));
  CHECK(less(u, x));  // x precedes u in the enumeration, so x is larger
  CHECK_FALSE(less(u, u));
}

TEST_CASE("property: canonical form is idempotent under reshuffling") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    auto space = varinv::testing::random_space(rng);
    Expr e = varinv::testing::random_expr(rng, space);
    std::vector<std::pair<Monomial, Rational>> terms;
    for (const auto& [m, c] : e.terms()) {
      // split each coefficient into two halves to force merging
      terms.emplace_back(m, c / 2);
      terms.emplace_back(m, c / 2);
    }
    std::shuffle(terms.begin(), terms.end(), rng);
    CHECK(Expr::from_terms(space, terms) == e);
  }
}

TEST_CASE("property: ring laws hold structurally") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    auto space = varinv::testing::random_space(rng);
    Expr a = varinv::testing::random_expr(rng, space);
    Expr b = varinv::testing::random_expr(rng, space);
    Expr c = varinv::testing::random_expr(rng, space);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK((a - a).is_zero());
  }
}

TEST_CASE("property: mixed partials commute and eval is a homomorphism") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    auto space = varinv::testing::random_space(rng);
    Expr a = varinv::testing::random_expr(rng, space);
    Expr b = varinv::testing::random_expr(rng, space);
    JetVar v = varinv::testing::random_var(rng, *space, true);
    JetVar w = varinv::testing::random_var(rng, *space, true);
    CHECK(partial_derivative(partial_derivative(a, v), w) ==
          partial_derivative(partial_derivative(a, w), v));
    // Leibniz
    CHECK(partial_derivative(a * b, v) ==
          partial_derivative(a, v) * b + a * partial_derivative(b, v));

    std::map<JetVar, Rational> point;
    for (const Expr* e : {&a, &b})
      for (const auto& [m, c] : e->terms())
        for (const auto& [var, p] : m.factors())
          point.emplace(var, varinv::testing::random_coefficient(rng));
    CHECK(eval_at_point(a * b, point) == eval_at_point(a, point) * eval_at_point(b, point));
    CHECK(eval_at_point(a + b, point) == eval_at_point(a, point) + eval_at_point(b, point));
  }
}

TEST_CASE("substitute replaces variables simultaneously") {
  Vars v;
  Expr e = v.u * v.ux + v.x;
  Expr r = substitute(e, {{v.vu, v.ux}, {v.vux, v.u}}, v.space);
  CHECK(r == v.ux * v.u + v.x);
  CHECK(substitute(v.u.pow(2), {{v.vu, v.x + Expr::constant(v.space, 1)}}, v.space) ==
        v.x.pow(2) + Rational(2) * v.x + Expr::constant(v.space, 1));
}
