#pragma once

// Total derivatives, Euler-Lagrange source forms, Helmholtz expressions and
// the Tonti-Vainberg Lagrangian over polynomial jet expressions.

#include <vector>

#include "varinv/jet/expr.hpp"

namespace varinv::varcalc {

using jet::Expr;
using jet::MultiIndex;
using jet::SpacePtr;

struct SourceForm {
  SpacePtr space;
  std::vector<Expr> components;  // E_sigma, one per dependent variable

  static SourceForm from(std::vector<Expr> components);
  friend bool operator==(const SourceForm& a, const SourceForm& b) {
    return a.components == b.components;
  }
};

struct Lagrangian {
  SpacePtr space;
  Expr density;

  explicit Lagrangian(Expr l) : space(l.space()), density(std::move(l)) {}
};

struct HelmholtzEntry {
  int sigma;
  int mu;
  MultiIndex index;
  Expr value;
};

struct HelmholtzReport {
  SpacePtr space;
  std::vector<HelmholtzEntry> entries;  // ordered by (m, J, sigma, mu)
  bool variational = true;

  /// Entries with a nonzero value, in entry order.
  std::vector<const HelmholtzEntry*> witnesses() const;
};

/// d_j, a derivation raising the jet order by one.
Expr total_derivative(const Expr& e, int j);

/// d_{j1} ... d_{jm} applied in sequence.
Expr total_derivative(const Expr& e, const MultiIndex& J);

SourceForm euler_lagrange(const Lagrangian& L);

HelmholtzReport helmholtz(const SourceForm& E);

Lagrangian tonti_lagrangian(const SourceForm& E);

}  // namespace varinv::varcalc
