#include "doctest.h"

#include <cmath>
#include <random>

#include "random_poly.hpp"
#include "varinv/parse/problem.hpp"
#include "varinv/varcalc/varcalc.hpp"

using namespace varinv;
using namespace varinv::varcalc;
using jet::Expr;
using jet::JetVar;
using jet::Rational;

namespace {

Expr parse_expr(const jet::SpacePtr& space, const std::string& text) {
  std::string src = "lagrangian e { independent: ";
  for (int j = 0; j < space->n(); ++j) src += (j ? ", " : "") + space->independents[j];
  src += "; dependent: ";
  for (int s = 0; s < space->l(); ++s) src += (s ? ", " : "") + space->dependents[s];
  src += "; L: " + text + "; }";
  return parse::parse_problem(src).body.at(0).in_space(space);
}

// Polynomial test field on [0,1]^n: sum a_{pq} y0^p y1^q, degree <= 3.
struct Field {
  double a[4][4] = {};

  double derivative(const double* y, int d0, int d1) const {
    double s = 0;
    for (int p = d0; p < 4; ++p)
      for (int q = d1; q < 4; ++q) {
        if (a[p][q] == 0) continue;
        double c = a[p][q];
        for (int i = 0; i < d0; ++i) c *= p - i;
        for (int i = 0; i < d1; ++i) c *= q - i;
        s += c * std::pow(y[0], p - d0) * std::pow(y[1], q - d1);
      }
    return s;
  }
};

// eta = prod (y(1-y))^3, with derivatives by repeated product rule.
double bump_1d(double y, int d) {
  // b(y) = y^3 (1-y)^3 = y^3 - 3y^4 + 3y^5 - y^6
  const double c[7] = {0, 0, 0, 1, -3, 3, -1};
  double s = 0;
  for (int p = d; p < 7; ++p) {
    double k = c[p];
    for (int i = 0; i < d; ++i) k *= p - i;
    s += k * std::pow(y, p - d);
  }
  return s;
}

double bump(const double* y, int n, int d0, int d1) {
  double v = bump_1d(y[0], d0);
  if (n > 1) v *= bump_1d(y[1], d1);
  return v;
}

struct Quadrature {
  std::vector<double> nodes, weights;  // on [0,1]

  explicit Quadrature(int m) {
    for (int i = 0; i < m; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (m + 0.5));
      double dp = 0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1, p1 = z;
        for (int k = 2; k <= m; ++k) {
          double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = m * (z * p1 - p0) / (z * z - 1);
        double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      nodes.push_back(0.5 * (z + 1));
      weights.push_back(1.0 / ((1 - z * z) * dp * dp));
    }
  }
};

std::pair<int, int> counts(const jet::MultiIndex& J) {
  int c[2] = {0, 0};
  for (int j : J.indices()) ++c[j];
  return {c[0], c[1]};
}

std::map<JetVar, Rational> point_values(const jet::JetSpace& space, const std::vector<Field>& u,
                                        const double* y, int varied, double eps) {
  std::map<JetVar, Rational> pt;
  for (int j = 0; j < space.n(); ++j) pt.emplace(JetVar::independent(j), Rational(y[j]));
  for (int s = 0; s < space.l(); ++s)
    for (int m = 0; m <= space.order; ++m)
      for (const auto& J : jet::multi_indices(space.n(), m)) {
        auto [d0, d1] = counts(J);
        double v = u[s].derivative(y, d0, d1);
        if (s == varied) v += eps * bump(y, space.n(), d0, d1);
        pt.emplace(JetVar::jet(s, J), Rational(v));
      }
  return pt;
}

// d/d eps of the action of L at u + eps*eta e_sigma, from the discretized
// integral only; the five-point stencil is exact for quartics in eps.
double action_variation(const Expr& L, const std::vector<Field>& u, int sigma,
                        const Quadrature& q) {
  const auto& space = *L.space();
  const double h = 0.25;
  auto action = [&](double eps) {
    double s = 0;
    const size_t m1 = q.nodes.size(), m2 = space.n() > 1 ? q.nodes.size() : 1;
    for (size_t a = 0; a < m1; ++a)
      for (size_t b = 0; b < m2; ++b) {
        double y[2] = {q.nodes[a], space.n() > 1 ? q.nodes[b] : 0.0};
        double w = q.weights[a] * (space.n() > 1 ? q.weights[b] : 1.0);
        s += w * jet::eval_at_point(L, point_values(space, u, y, sigma, eps)).get_d();
      }
    return s;
  };
  return (8 * (action(h) - action(-h)) - (action(2 * h) - action(-2 * h))) / (12 * h);
}

double pairing(const Expr& E, const std::vector<Field>& u, int sigma, const Quadrature& q) {
  const auto& space = *E.space();
  double s = 0;
  const size_t m1 = q.nodes.size(), m2 = space.n() > 1 ? q.nodes.size() : 1;
  for (size_t a = 0; a < m1; ++a)
    for (size_t b = 0; b < m2; ++b) {
      double y[2] = {q.nodes[a], space.n() > 1 ? q.nodes[b] : 0.0};
      double w = q.weights[a] * (space.n() > 1 ? q.weights[b] : 1.0);
      s += w * jet::eval_at_point(E, point_values(space, u, y, -1, 0)).get_d() *
           bump(y, space.n(), 0, 0);
    }
  return s;
}

}  // namespace

TEST_CASE("total_derivative examples") {
  auto space = jet::make_space({"t", "x"}, {"u"}, 1);
  auto e = [&](const char* s) { return parse_expr(space, s); };
  auto big = jet::with_order(space, 2);
  auto f = [&](const char* s) { return parse_expr(big, s); };
  CHECK(total_derivative(e("u*u_x"), 1) == f("u_x^2 + u*u_xx"));
  CHECK(total_derivative(e("x*u"), 1) == f("u + x*u_x"));
  CHECK(total_derivative(e("u_x"), 0) == f("u_tx"));
  CHECK(total_derivative(e("u_x"), 0).space()->order == 2);
  CHECK_THROWS_AS(total_derivative(e("u"), 2), jet::DomainError);
}

TEST_CASE("euler_lagrange examples") {
  auto sx = jet::make_space({"x"}, {"u"}, 2);
  auto stx = jet::make_space({"t", "x"}, {"u"}, 2);
  CHECK(euler_lagrange(Lagrangian(parse_expr(jet::make_space({"x"}, {"u"}, 1), "1/2*u_x^2")))
            .components[0] == parse_expr(sx, "-u_xx"));
  CHECK(euler_lagrange(Lagrangian(parse_expr(jet::make_space({"t", "x"}, {"u"}, 1),
                                             "1/2*u_t^2 - 1/2*u_x^2")))
            .components[0] == parse_expr(stx, "-u_tt + u_xx"));
  CHECK(euler_lagrange(Lagrangian(parse_expr(sx, "1/2*u*u_xx"))).components[0] ==
        parse_expr(sx, "u_xx"));
}

TEST_CASE("euler_lagrange agrees with the variation of a discretized action") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> coef(-4, 4);
  const Quadrature q(16);
  for (int trial = 0; trial < 12; ++trial) {
    auto space = testing::random_space(rng);
    Expr L = testing::random_expr(rng, space);
    auto E = euler_lagrange(Lagrangian(L));
    std::vector<Field> u(space->l());
    for (auto& f : u)
      for (int p = 0; p < 4; ++p)
        for (int r = 0; p + r < 4; ++r)
          if (space->n() > 1 || r == 0) f.a[p][r] = coef(rng) / 4.0;
    for (int sigma = 0; sigma < space->l(); ++sigma) {
      const double lhs = action_variation(L, u, sigma, q);
      const double rhs = pairing(E.components[sigma], u, sigma, q);
      INFO("L = " << parse::render_expr(L));
      CHECK(std::abs(lhs - rhs) <= 1e-9 * (1 + std::abs(lhs)));
    }
  }
}

TEST_CASE("helmholtz verdicts for classical equations") {
  auto stx = jet::make_space({"t", "x"}, {"u"}, 2);
  auto wave = helmholtz(SourceForm::from({parse_expr(stx, "u_tt - u_xx")}));
  CHECK(wave.variational);
  CHECK(wave.witnesses().empty());

  auto sx = jet::make_space({"x"}, {"u"}, 2);
  auto harmonic = helmholtz(SourceForm::from({parse_expr(sx, "u_xx")}));
  CHECK(harmonic.variational);
  for (const auto& e : harmonic.entries) CHECK(e.value.is_zero());

  auto heat = helmholtz(SourceForm::from({parse_expr(stx, "u_t - u_xx")}));
  CHECK_FALSE(heat.variational);
  auto w = heat.witnesses();
  REQUIRE(w.size() == 1);
  CHECK(w[0]->sigma == 0);
  CHECK(w[0]->mu == 0);
  CHECK(w[0]->index == jet::MultiIndex({0}));
  CHECK(w[0]->value == Expr::constant(heat.space, 2));
}

TEST_CASE("helmholtz flags a non-symmetric coupled first-order system") {
  auto s = jet::make_space({"x"}, {"u", "w"}, 1);
  auto r = helmholtz(SourceForm::from({parse_expr(s, "w"), parse_expr(s, "2*u")}));
  CHECK_FALSE(r.variational);
  auto ok = helmholtz(SourceForm::from({parse_expr(s, "w"), parse_expr(s, "u")}));
  CHECK(ok.variational);
}

TEST_CASE("property: helmholtz of an Euler-Lagrange form vanishes") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    auto space = testing::random_space(rng);
    Expr L = testing::random_expr(rng, space);
    auto report = helmholtz(euler_lagrange(Lagrangian(L)));
    INFO("L = " << parse::render_expr(L));
    CHECK(report.variational);
  }
}

TEST_CASE("tonti_lagrangian examples") {
  auto sx = jet::make_space({"x"}, {"u"}, 2);
  CHECK(tonti_lagrangian(SourceForm::from({parse_expr(sx, "u")})).density ==
        parse_expr(sx, "1/2*u^2"));
  CHECK(tonti_lagrangian(SourceForm::from({parse_expr(sx, "u_xx")})).density ==
        parse_expr(sx, "1/2*u*u_xx"));
  auto stx = jet::make_space({"t", "x"}, {"u"}, 2);
  auto E = SourceForm::from({parse_expr(stx, "u_tt - u_xx")});
  auto L = tonti_lagrangian(E);
  CHECK(L.density == parse_expr(stx, "1/2*u*u_tt - 1/2*u*u_xx"));
  CHECK(euler_lagrange(L).components[0] == E.components[0]);
}

TEST_CASE("property: tonti round trip over Euler-Lagrange forms") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 40; ++trial) {
    auto space = testing::random_space(rng);
    auto E = euler_lagrange(Lagrangian(testing::random_expr(rng, space)));
    auto back = euler_lagrange(tonti_lagrangian(E));
    REQUIRE(back.components.size() == E.components.size());
    for (size_t s = 0; s < E.components.size(); ++s)
      CHECK(back.components[s] == E.components[s]);
  }
}

TEST_CASE("zero source form") {
  auto s = jet::make_space({"x"}, {"u", "w"}, 1);
  SourceForm zero = SourceForm::from({Expr(s), Expr(s)});
  CHECK(helmholtz(zero).variational);
  CHECK(tonti_lagrangian(zero).density.is_zero());
}

TEST_CASE("property: order bookkeeping") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 30; ++trial) {
    auto space = testing::random_space(rng);
    auto E = euler_lagrange(Lagrangian(testing::random_expr(rng, space)));
    for (const auto& c : E.components) CHECK(c.max_order() <= 2 * space->order);
    std::vector<Expr> comps;
    for (int s = 0; s < space->l(); ++s) comps.push_back(testing::random_expr(rng, space));
    auto G = SourceForm::from(comps);
    for (const auto& e : helmholtz(G).entries) CHECK(e.value.max_order() <= 2 * space->order);
  }
}
