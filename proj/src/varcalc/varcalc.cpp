#include "varinv/varcalc/varcalc.hpp"

#include <stdexcept>

namespace varinv::varcalc {

using jet::JetVar;
using jet::Monomial;
using jet::Rational;

SourceForm SourceForm::from(std::vector<Expr> components) {
  if (components.empty()) throw jet::DomainError("source form needs at least one component");
  SpacePtr space = components.front().space();
  for (const auto& c : components) {
    if (!c.space()->compatible(*space)) throw jet::DomainError("source form components disagree on space");
    if (c.space()->order > space->order) space = c.space();
  }
  if (static_cast<int>(components.size()) != space->l())
    throw jet::DomainError("source form needs one component per dependent variable");
  for (auto& c : components) c = c.in_space(space);
  return SourceForm{space, std::move(components)};
}

std::vector<const HelmholtzEntry*> HelmholtzReport::witnesses() const {
  std::vector<const HelmholtzEntry*> out;
  for (const auto& e : entries)
    if (!e.value.is_zero()) out.push_back(&e);
  return out;
}

Expr total_derivative(const Expr& e, int j) {
  const auto& space = e.space();
  if (j < 0 || j >= space->n()) throw jet::DomainError("total derivative index out of range");
  auto raised = jet::with_order(space, space->order + 1);
  std::vector<std::pair<Monomial, Rational>> out;
  for (const auto& [m, c] : e.terms()) {
    for (const auto& [v, p] : m.factors()) {
      if (v.is_independent()) {
        if (v.index() == j) out.emplace_back(m.reduced(v), c * p);
        continue;
      }
      const JetVar up = JetVar::jet(v.index(), v.multi_index().with(j));
      out.emplace_back(m.reduced(v) * Monomial::of(up), c * p);
    }
  }
  return Expr::from_terms(raised, out);
}

Expr total_derivative(const Expr& e, const MultiIndex& J) {
  Expr r = e;
  for (int j : J.indices()) r = total_derivative(r, j);
  return r;
}

SourceForm euler_lagrange(const Lagrangian& L) {
  const auto& space = L.space;
  const int k = space->order;
  std::vector<Expr> comps;
  for (int sigma = 0; sigma < space->l(); ++sigma) {
    Expr acc(jet::with_order(space, 2 * k));
    for (int m = 0; m <= k; ++m) {
      for (const auto& J : jet::multi_indices(space->n(), m)) {
        Expr d = partial_derivative(L.density, JetVar::jet(sigma, J));
        if (d.is_zero()) continue;
        d = total_derivative(d, J);
        if (m % 2) acc -= d; else acc += d;
      }
    }
    comps.push_back(std::move(acc));
  }
  return SourceForm::from(std::move(comps));
}

namespace {

mpz_class binomial(int n, int r) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(r));
  return b;
}

}  // namespace

// H_{sigma mu}^J = dE_sigma/dy^mu_J
//   - sum_{r=m}^{k} (-1)^r C(r,m) sum_P d_P dE_mu/dy^sigma_{J P}
// Over ordered tuples the partials are symmetrized; over sorted P each term
// carries c(J) c(P) / c(J P), c = number of distinct orderings.
HelmholtzReport helmholtz(const SourceForm& E) {
  const auto& space = E.space;
  const int k = space->order;
  const int n = space->n();
  HelmholtzReport report{jet::with_order(space, 2 * k), {}, true};
  for (int m = 0; m <= k; ++m) {
    for (const auto& J : jet::multi_indices(n, m)) {
      const mpz_class cJ = J.orderings();
      for (int sigma = 0; sigma < space->l(); ++sigma) {
        for (int mu = 0; mu < space->l(); ++mu) {
          Expr h = partial_derivative(E.components[sigma], JetVar::jet(mu, J));
          for (int r = m; r <= k; ++r) {
            const mpz_class bin = binomial(r, m);
            for (const auto& P : jet::multi_indices(n, r - m)) {
              const MultiIndex JP = J.merged(P);
              Expr d = partial_derivative(E.components[mu], JetVar::jet(sigma, JP));
              if (d.is_zero()) continue;
              d = total_derivative(d, P);
              Rational w(mpz_class(cJ * P.orderings() * bin), JP.orderings());
              w.canonicalize();
              if (r % 2) w = -w;
              h -= d * w;
            }
          }
          if (!h.is_zero()) report.variational = false;
          report.entries.push_back({sigma, mu, J, h.in_space(report.space)});
        }
      }
    }
  }
  return report;
}

Lagrangian tonti_lagrangian(const SourceForm& E) {
  const auto& space = E.space;
  Expr L(space);
  for (int sigma = 0; sigma < space->l(); ++sigma) {
    Expr integrated(space);
    for (const auto& [d, part] : jet::scale_dependent(E.components[sigma]))
      integrated += part * Rational(1, static_cast<unsigned long>(d) + 1);
    L += Expr::variable(space, JetVar::jet(sigma)) * integrated;
  }
  return Lagrangian(L);
}

}  // namespace varinv::varcalc
