#include "doctest.h"

#include <random>

#include "random_poly.hpp"
#include "varinv/mech/mech.hpp"

using namespace varinv;
using namespace varinv::mech;
using jet::JetVar;

namespace {

struct Plane {
  jet::SpacePtr chart = make_chart({"q", "p"});
  Expr q = coordinate(chart, 0);
  Expr p = coordinate(chart, 1);
  Expr zero = Expr(chart);
  Expr one = Expr::constant(chart, 1);

  SymTwoForm area() const {
    SymTwoForm w(chart);
    w.set(0, 1, one);
    return w;
  }
  SymVectorField field(Expr fq, Expr fp) const { return SymVectorField::from(chart, {fq, fp}); }
};

jet::SpacePtr random_chart(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(2, 4);
  std::vector<std::string> names = {"q", "p", "r", "s"};
  names.resize(dim(rng));
  return make_chart(names);
}

testing::PolyShape chart_shape() { return {4, 3, false}; }

}  // namespace

TEST_CASE("exterior_closed examples") {
  Plane P;
  CHECK(exterior_closed(P.area()).closed);
  SymTwoForm w(P.chart);
  w.set(0, 1, P.q);
  CHECK(exterior_closed(w).closed);

  auto c3 = make_chart({"a", "b", "c"});
  SymTwoForm w3(c3);
  w3.set(0, 1, coordinate(c3, 2));
  auto r = exterior_closed(w3);
  CHECK_FALSE(r.closed);
  REQUIRE(r.residual.size() == 1);
  CHECK(r.residual[0].value == Expr::constant(c3, 1));
}

TEST_CASE("two-form storage is antisymmetric") {
  Plane P;
  SymTwoForm w(P.chart);
  w.set(1, 0, P.q);
  CHECK(w.at(0, 1) == -P.q);
  CHECK(w.at(1, 0) == P.q);
  CHECK(w.at(0, 0).is_zero());
  CHECK_THROWS(w.set(1, 1, P.q));
}

TEST_CASE("lie_derivative examples") {
  Plane P;
  CHECK(lie_derivative(P.field(P.p, -P.q), P.area()).is_zero());
  CHECK(lie_derivative(P.field(P.one, P.zero), P.area()).is_zero());
  CHECK(lie_derivative(P.field(P.q, P.zero), P.area()) == P.area());
  auto other = make_chart({"x", "y"});
  CHECK_THROWS_AS(lie_derivative(SymVectorField::from(other, {Expr(other), Expr(other)}), P.area()),
                  ChartMismatch);
}

TEST_CASE("contract examples") {
  Plane P;
  CHECK(contract(P.field(P.p, -P.q), P.area()) == SymOneForm::from(P.chart, {P.q, P.p}));
  CHECK(contract(P.field(P.zero, P.zero), P.area()) == SymOneForm::zero(P.chart));
  CHECK(contract(P.field(P.one, P.zero), P.area()) == SymOneForm::from(P.chart, {P.zero, P.one}));
}

TEST_CASE("poincare_homotopy examples") {
  Plane P;
  CHECK(poincare_homotopy(SymOneForm::from(P.chart, {P.q, P.p})) ==
        Rational(1, 2) * (P.q * P.q + P.p * P.p));
  CHECK(poincare_homotopy(SymOneForm::from(P.chart, {P.one, P.zero})) == P.q);
  auto B = poincare_homotopy(P.area());
  CHECK(B == SymOneForm::from(P.chart, {Rational(-1, 2) * P.p, Rational(1, 2) * P.q}));
  CHECK(exterior_derivative(B) == P.area());
}

TEST_CASE("poincare_homotopy rejects forms that are not closed") {
  Plane P;
  try {
    poincare_homotopy(SymOneForm::from(P.chart, {P.p, P.zero}));
    FAIL("expected NotClosed");
  } catch (const NotClosed& e) {
    REQUIRE(e.residual().size() == 1);
    CHECK(e.residual()[0].value == -P.one);
  }
  auto c3 = make_chart({"a", "b", "c"});
  SymTwoForm w3(c3);
  w3.set(0, 1, coordinate(c3, 2));
  CHECK_THROWS_AS(poincare_homotopy(w3), NotClosed);
}

TEST_CASE("fode_lagrangian examples") {
  Plane P;
  auto osc = fode_lagrangian(P.field(P.p, -P.q), P.area());
  CHECK(osc.energy == Rational(1, 2) * (P.q * P.q + P.p * P.p));
  CHECK(osc.potential == SymOneForm::from(P.chart, {Rational(-1, 2) * P.p, Rational(1, 2) * P.q}));
  for (const auto& r : osc.residual) CHECK(r.is_zero());
  REQUIRE(osc.determinant_samples.size() == 10);
  for (const auto& s : osc.determinant_samples) CHECK(s.determinant == 1);

  auto drift = fode_lagrangian(P.field(P.one, P.zero), P.area());
  CHECK(drift.energy == P.p);
  for (const auto& r : drift.residual) CHECK(r.is_zero());

  try {
    fode_lagrangian(P.field(P.q, P.zero), P.area());
    FAIL("expected FodeHypothesisError");
  } catch (const FodeHypothesisError& e) {
    CHECK(e.closedness().closed);
    CHECK(e.lie() == P.area());
  }
}

TEST_CASE("fode Lagrangian is first order in velocities") {
  Plane P;
  auto osc = fode_lagrangian(P.field(P.p, -P.q), P.area());
  auto tangent = osc.lagrangian.space();
  REQUIRE(dimension(tangent) == 4);
  CHECK(tangent->dependents[2] == "qdot");
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      CHECK(partial_derivative(partial_derivative(osc.lagrangian, JetVar::jet(2 + j)),
                               JetVar::jet(2 + k))
                .is_zero());
  // omega_L = -d theta_L restricted to positions reproduces omega
  auto data = cartan_data(osc.lagrangian);
  CHECK(data.omega.at(0, 1) == lift_to_tangent(P.one, tangent));
  CHECK(data.omega.at(0, 2).is_zero());
  CHECK(data.omega.at(2, 3).is_zero());
}

TEST_CASE("cartan_data examples") {
  auto base = make_chart({"q"});
  auto T = make_tangent_chart(base);
  Expr q = coordinate(T, 0), v = coordinate(T, 1);
  auto free = cartan_data(Rational(1, 2) * v * v);
  CHECK(free.theta == SymOneForm::from(T, {v, Expr(T)}));
  CHECK(free.omega.at(0, 1) == Expr::constant(T, 1));
  CHECK(free.energy == Rational(1, 2) * v * v);

  auto osc = cartan_data(Rational(1, 2) * v * v - Rational(1, 2) * q * q);
  CHECK(osc.energy == Rational(1, 2) * v * v + Rational(1, 2) * q * q);

  auto deg = cartan_data(q);
  CHECK(deg.theta == SymOneForm::zero(T));
  CHECK(deg.omega.is_zero());
  CHECK(deg.energy == -q);
}

TEST_CASE("sode_check examples") {
  auto base = make_chart({"q"});
  auto T = make_tangent_chart(base);
  Expr q = coordinate(T, 0), v = coordinate(T, 1);
  SymTwoForm w(T);
  w.set(0, 1, Expr::constant(T, 1));
  CHECK(sode_check(SymVectorField::from(T, {v, Expr(T)}), w).hypotheses_hold);
  CHECK(sode_check(SymVectorField::from(T, {v, -q}), w).hypotheses_hold);

  auto first = sode_check(SymVectorField::from(T, {q, -q}), w);
  CHECK_FALSE(first.second_order);
  CHECK(first.second_order_failures == std::vector<int>{0});

  auto T2 = make_tangent_chart(make_chart({"q", "r"}));
  SymTwoForm w2(T2);
  w2.set(0, 2, Expr::constant(T2, 1));
  w2.set(1, 3, Expr::constant(T2, 1));
  w2.set(2, 3, Expr::constant(T2, 1));
  auto report = sode_check(
      SymVectorField::from(T2, {coordinate(T2, 2), coordinate(T2, 3), Expr(T2), Expr(T2)}), w2);
  CHECK_FALSE(report.hypotheses_hold);
  REQUIRE(report.vertical.size() == 1);
  CHECK(report.vertical[0].j == 0);
  CHECK(report.vertical[0].k == 1);
}

TEST_CASE("property: Cartan magic formula on closed forms") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 40; ++trial) {
    auto chart = random_chart(rng);
    const int d = dimension(chart);
    // closed by construction: omega = d(beta)
    std::vector<Expr> beta, f;
    for (int j = 0; j < d; ++j) {
      beta.push_back(testing::random_expr(rng, chart, chart_shape()));
      f.push_back(testing::random_expr(rng, chart, chart_shape()));
    }
    SymTwoForm omega = exterior_derivative(SymOneForm::from(chart, beta));
    REQUIRE(exterior_closed(omega).closed);
    auto field = SymVectorField::from(chart, f);
    CHECK(lie_derivative(field, omega) == exterior_derivative(contract(field, omega)));
  }
}

TEST_CASE("property: homotopy operators invert d on closed forms") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 40; ++trial) {
    auto chart = random_chart(rng);
    const int d = dimension(chart);
    Expr g = testing::random_expr(rng, chart, chart_shape());
    auto alpha = exterior_derivative(g, chart);
    CHECK(exterior_derivative(poincare_homotopy(alpha), chart) == alpha);

    std::vector<Expr> beta;
    for (int j = 0; j < d; ++j) beta.push_back(testing::random_expr(rng, chart, chart_shape()));
    SymTwoForm omega = exterior_derivative(SymOneForm::from(chart, beta));
    CHECK(exterior_derivative(poincare_homotopy(omega)) == omega);
  }
}

TEST_CASE("property: fode residual vanishes for linear Hamiltonian fields") {
  std::mt19937_64 rng(57);
  std::uniform_int_distribution<int> half(1, 2);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = half(rng);
    std::vector<std::string> names = {"q", "r", "p", "s"};
    if (m == 1) names = {"q", "p"};
    auto chart = make_chart(names);
    // quadratic Hamiltonian, canonical omega = sum dq^i ^ dp_i, Gamma = J grad H
    Expr H(chart);
    for (int a = 0; a < 2 * m; ++a)
      for (int b = a; b < 2 * m; ++b)
        H += testing::random_coefficient(rng) * coordinate(chart, a) * coordinate(chart, b);
    SymTwoForm omega(chart);
    std::vector<Expr> f(2 * m, Expr(chart));
    for (int i = 0; i < m; ++i) {
      omega.set(i, m + i, Expr::constant(chart, 1));
      f[i] = partial_derivative(H, JetVar::jet(m + i));
      f[m + i] = -partial_derivative(H, JetVar::jet(i));
    }
    auto result = fode_lagrangian(SymVectorField::from(chart, f), omega, trial);
    for (const auto& r : result.residual) CHECK(r.is_zero());
    CHECK(exterior_derivative(result.energy, chart) == contract(SymVectorField::from(chart, f), omega));
    CHECK(exterior_derivative(result.potential) == omega);
    CHECK(result.energy - H == Expr(chart));
  }
}

TEST_CASE("property: Cartan data of a natural Lagrangian yields the force -grad V") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 30; ++trial) {
    auto base = random_chart(rng);
    const int d = dimension(base);
    auto T = make_tangent_chart(base);
    Expr V = lift_to_tangent(testing::random_expr(rng, base, chart_shape()), T);
    Expr L = -V;
    for (int j = 0; j < d; ++j) L += Rational(1, 2) * coordinate(T, d + j) * coordinate(T, d + j);
    auto data = cartan_data(L);
    std::vector<Expr> f;
    for (int j = 0; j < d; ++j) f.push_back(coordinate(T, d + j));
    for (int j = 0; j < d; ++j) f.push_back(-partial_derivative(V, JetVar::jet(j)));
    auto field = SymVectorField::from(T, f);
    CHECK(contract(field, data.omega) == exterior_derivative(data.energy, T));
    CHECK(sode_check(field, data.omega).hypotheses_hold);
  }
}
