#include "varinv/mech/mech.hpp"

#include <random>

namespace varinv::mech {

using jet::JetVar;
using jet::Monomial;

SpacePtr make_chart(std::vector<std::string> coordinates) {
  return jet::make_space({}, std::move(coordinates), 0);
}

int dimension(const SpacePtr& chart) { return chart ? chart->l() : 0; }

Expr coordinate(const SpacePtr& chart, int j) { return Expr::variable(chart, JetVar::jet(j)); }

SpacePtr make_tangent_chart(const SpacePtr& chart) {
  std::vector<std::string> names = chart->dependents;
  for (const auto& q : chart->dependents) names.push_back(q + "dot");
  return make_chart(std::move(names));
}

namespace {

void require_chart(const SpacePtr& a, const SpacePtr& b) {
  if (!a || !b || !(*a == *b)) throw ChartMismatch("objects live on different charts");
}

Expr d_coord(const Expr& e, int j) { return partial_derivative(e, JetVar::jet(j)); }

/// Rebuilds e (which must not involve velocities) on the base chart.
Expr project_to_base(const Expr& e, const SpacePtr& base) {
  std::vector<std::pair<Monomial, Rational>> terms;
  for (const auto& [m, c] : e.terms()) {
    for (const auto& [v, p] : m.factors())
      if (v.index() >= base->l()) throw jet::DomainError("expression depends on velocities");
    terms.emplace_back(m, c);
  }
  return Expr::from_terms(base, terms);
}

}  // namespace

Expr lift_to_tangent(const Expr& e, const SpacePtr& tangent) {
  std::vector<std::pair<Monomial, Rational>> terms(e.terms().begin(), e.terms().end());
  return Expr::from_terms(tangent, terms);
}

SymVectorField SymVectorField::from(SpacePtr chart, std::vector<Expr> components) {
  if (static_cast<int>(components.size()) != dimension(chart))
    throw jet::DomainError("vector field needs one component per coordinate");
  for (auto& c : components) c = c.in_space(chart);
  return {std::move(chart), std::move(components)};
}

SymOneForm SymOneForm::zero(const SpacePtr& chart) {
  return {chart, std::vector<Expr>(static_cast<std::size_t>(dimension(chart)), Expr(chart))};
}

SymOneForm SymOneForm::from(SpacePtr chart, std::vector<Expr> coefficients) {
  if (static_cast<int>(coefficients.size()) != dimension(chart))
    throw jet::DomainError("one-form needs one coefficient per coordinate");
  for (auto& c : coefficients) c = c.in_space(chart);
  return {std::move(chart), std::move(coefficients)};
}

SymTwoForm::SymTwoForm(SpacePtr chart) : chart_(std::move(chart)), d_(dimension(chart_)) {
  upper_.assign(static_cast<std::size_t>(d_ * (d_ - 1) / 2), Expr(chart_));
}

namespace {
std::size_t packed_slot(int d, int j, int k) {
  return static_cast<std::size_t>(j * d - j * (j + 1) / 2 + (k - j - 1));
}
}  // namespace

Expr SymTwoForm::at(int j, int k) const {
  if (j == k) return Expr(chart_);
  if (j < k) return upper_.at(packed_slot(d_, j, k));
  return -upper_.at(packed_slot(d_, k, j));
}

void SymTwoForm::set(int j, int k, Expr value) {
  if (j == k) throw jet::DomainError("a two-form has no diagonal entries");
  if (j > k) {
    std::swap(j, k);
    value = -value;
  }
  upper_.at(packed_slot(d_, j, k)) = value.in_space(chart_);
}

bool SymTwoForm::is_zero() const {
  for (const auto& e : upper_)
    if (!e.is_zero()) return false;
  return true;
}

ClosednessReport exterior_closed(const SymTwoForm& omega) {
  ClosednessReport report;
  const int d = omega.dim();
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      for (int k = j + 1; k < d; ++k) {
        Expr r = d_coord(omega.at(j, k), i) + d_coord(omega.at(k, i), j) +
                 d_coord(omega.at(i, j), k);
        if (!r.is_zero()) {
          report.closed = false;
          report.residual.push_back({i, j, k, std::move(r)});
        }
      }
  return report;
}

SymTwoForm exterior_derivative(const SymOneForm& alpha) {
  SymTwoForm out(alpha.chart);
  const int d = dimension(alpha.chart);
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k)
      out.set(j, k, d_coord(alpha.coefficients[k], j) - d_coord(alpha.coefficients[j], k));
  return out;
}

SymOneForm exterior_derivative(const Expr& f, const SpacePtr& chart) {
  std::vector<Expr> c;
  for (int j = 0; j < dimension(chart); ++j) c.push_back(d_coord(f.in_space(chart), j));
  return {chart, std::move(c)};
}

SymTwoForm lie_derivative(const SymVectorField& field, const SymTwoForm& omega) {
  require_chart(field.chart, omega.chart());
  const int d = omega.dim();
  const auto& f = field.components;
  SymTwoForm out(omega.chart());
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      Expr acc(omega.chart());
      for (int i = 0; i < d; ++i) {
        acc += f[i] * d_coord(omega.at(j, k), i);
        acc += omega.at(i, k) * d_coord(f[i], j);
        acc += omega.at(j, i) * d_coord(f[i], k);
      }
      out.set(j, k, std::move(acc));
    }
  return out;
}

SymOneForm contract(const SymVectorField& field, const SymTwoForm& omega) {
  require_chart(field.chart, omega.chart());
  const int d = omega.dim();
  std::vector<Expr> c;
  for (int k = 0; k < d; ++k) {
    Expr acc(omega.chart());
    for (int j = 0; j < d; ++j) acc += field.components[j] * omega.at(j, k);
    c.push_back(std::move(acc));
  }
  return {omega.chart(), std::move(c)};
}

Expr poincare_homotopy(const SymOneForm& alpha) {
  const auto& chart = alpha.chart;
  const int d = dimension(chart);
  std::vector<ResidualEntry> residual;
  SymTwoForm da = exterior_derivative(alpha);
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k)
      if (!da.at(j, k).is_zero()) residual.push_back({{j, k}, da.at(j, k)});
  if (!residual.empty()) throw NotClosed("one-form is not closed", std::move(residual));

  // Degree-d homogeneous pieces of alpha_j(tq) q^j integrate with 1/(d+1).
  Expr E(chart);
  for (int j = 0; j < d; ++j)
    for (const auto& [deg, part] : jet::scale_dependent(alpha.coefficients[j]))
      E += part * coordinate(chart, j) * Rational(1, static_cast<unsigned long>(deg) + 1);
  if (!(exterior_derivative(E, chart) == alpha))
    throw std::logic_error("homotopy potential failed dE = alpha");
  return E;
}

SymOneForm poincare_homotopy(const SymTwoForm& omega) {
  const auto& chart = omega.chart();
  const int d = omega.dim();
  auto closed = exterior_closed(omega);
  if (!closed.closed) {
    std::vector<ResidualEntry> residual;
    for (auto& r : closed.residual) residual.push_back({{r.i, r.j, r.k}, r.value});
    throw NotClosed("two-form is not closed", std::move(residual));
  }
  // B_k = int_0^1 t omega_{jk}(tq) q^j dt; degree-d pieces pick up 1/(d+2).
  std::vector<Expr> B;
  for (int k = 0; k < d; ++k) {
    Expr acc(chart);
    for (int j = 0; j < d; ++j)
      for (const auto& [deg, part] : jet::scale_dependent(omega.at(j, k)))
        acc += part * coordinate(chart, j) * Rational(1, static_cast<unsigned long>(deg) + 2);
    B.push_back(std::move(acc));
  }
  SymOneForm out{chart, std::move(B)};
  if (!(exterior_derivative(out) == omega))
    throw std::logic_error("homotopy potential failed dB = omega");
  return out;
}

namespace {

Rational determinant(std::vector<std::vector<Rational>> a) {
  const std::size_t n = a.size();
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (a[r][col] == 0) continue;
      const Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

}  // namespace

std::vector<DeterminantSample> nondegeneracy_samples(const SymTwoForm& omega, int count,
                                                    std::uint64_t seed) {
  const int d = omega.dim();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, 7);
  std::vector<DeterminantSample> out;
  for (int s = 0; s < count; ++s) {
    DeterminantSample sample;
    std::map<JetVar, Rational> point;
    for (int j = 0; j < d; ++j) {
      const int p = num(rng);
      const int q = den(rng);
      Rational r(p, q);
      r.canonicalize();
      sample.point.push_back(r);
      point.emplace(JetVar::jet(j), r);
    }
    std::vector<std::vector<Rational>> m(d, std::vector<Rational>(d));
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) m[j][k] = eval_at_point(omega.at(j, k), point);
    sample.determinant = determinant(std::move(m));
    out.push_back(std::move(sample));
  }
  return out;
}

FodeResult fode_lagrangian(const SymVectorField& field, const SymTwoForm& omega,
                           std::uint64_t seed) {
  require_chart(field.chart, omega.chart());
  const auto& chart = omega.chart();
  const int d = omega.dim();
  auto closedness = exterior_closed(omega);
  auto lie = lie_derivative(field, omega);
  if (!closedness.closed || !lie.is_zero()) {
    const char* what = !closedness.closed ? "omega is not closed" : "L_Gamma omega is not zero";
    throw FodeHypothesisError(what, std::move(closedness), std::move(lie));
  }

  SymOneForm B = poincare_homotopy(omega);
  Expr E = poincare_homotopy(contract(field, omega));

  const SpacePtr tangent = make_tangent_chart(chart);
  auto velocity = [&](int j) { return Expr::variable(tangent, JetVar::jet(d + j)); };
  auto position_partial = [&](const Expr& e, int j) { return partial_derivative(e, JetVar::jet(j)); };
  auto velocity_partial = [&](const Expr& e, int j) { return partial_derivative(e, JetVar::jet(d + j)); };

  Expr L = -lift_to_tangent(E, tangent);
  for (int j = 0; j < d; ++j) L -= lift_to_tangent(B.coefficients[j], tangent) * velocity(j);

  // Along an integral curve: v = f(q), a = (f . grad) f.
  std::map<JetVar, Expr> on_curve;
  std::vector<Expr> accel;
  for (int j = 0; j < d; ++j) {
    on_curve.emplace(JetVar::jet(d + j), lift_to_tangent(field.components[j], tangent));
    Expr a(chart);
    for (int i = 0; i < d; ++i) a += field.components[i] * d_coord(field.components[j], i);
    accel.push_back(lift_to_tangent(a, tangent));
  }

  std::vector<Expr> residual;
  for (int k = 0; k < d; ++k) {
    const Expr p = velocity_partial(L, k);
    Expr el = -position_partial(L, k);
    for (int j = 0; j < d; ++j) {
      el += position_partial(p, j) * velocity(j);
      el += velocity_partial(p, j) * accel[j];
    }
    residual.push_back(project_to_base(substitute(el, on_curve, tangent), chart));
  }

  return FodeResult{std::move(B), std::move(E), std::move(L), std::move(residual),
                    nondegeneracy_samples(omega, 10, seed)};
}

CartanData cartan_data(const Expr& lagrangian) {
  const SpacePtr& tangent = lagrangian.space();
  const int dim = dimension(tangent);
  if (dim % 2) throw jet::DomainError("tangent chart must have even dimension");
  const int d = dim / 2;
  auto theta = SymOneForm::zero(tangent);
  Expr energy = -lagrangian;
  for (int j = 0; j < d; ++j) {
    Expr p = partial_derivative(lagrangian, JetVar::jet(d + j));
    energy += coordinate(tangent, d + j) * p;
    theta.coefficients[j] = std::move(p);
  }
  SymTwoForm omega = exterior_derivative(theta);
  SymTwoForm neg(tangent);
  for (int j = 0; j < dim; ++j)
    for (int k = j + 1; k < dim; ++k) neg.set(j, k, -omega.at(j, k));
  return CartanData{std::move(theta), std::move(neg), std::move(energy)};
}

SodeReport sode_check(const SymVectorField& field, const SymTwoForm& omega) {
  require_chart(field.chart, omega.chart());
  const int dim = omega.dim();
  if (dim % 2) throw jet::DomainError("tangent chart must have even dimension");
  const int d = dim / 2;
  SodeReport report;
  for (int j = 0; j < d; ++j)
    if (!(field.components[j] == coordinate(field.chart, d + j)))
      report.second_order_failures.push_back(j);
  report.second_order = report.second_order_failures.empty();
  report.lie = lie_derivative(field, omega);
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      Expr w = omega.at(d + j, d + k);
      if (!w.is_zero()) report.vertical.push_back({j, k, std::move(w)});
    }
  report.hypotheses_hold = report.second_order && report.lie.is_zero() && report.vertical.empty();
  return report;
}

}  // namespace varinv::mech
