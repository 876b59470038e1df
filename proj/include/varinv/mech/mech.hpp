#pragma once

// Finite-dimensional inverse problem on a coordinate chart: forms, Lie
// derivatives, radial homotopy potentials, the first-order (FODE) Lagrangian
// construction and the second-order (SODE) hypothesis checks.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "varinv/jet/expr.hpp"

namespace varinv::mech {

using jet::Expr;
using jet::Rational;
using jet::SpacePtr;

/// Order-0 jet space whose dependent variables are the coordinates q^j.
SpacePtr make_chart(std::vector<std::string> coordinates);
int dimension(const SpacePtr& chart);
Expr coordinate(const SpacePtr& chart, int j);

/// Doubled chart {q^j, qdot^j}; positions first, velocities second.
SpacePtr make_tangent_chart(const SpacePtr& chart);

struct ChartMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SymVectorField {
  SpacePtr chart;
  std::vector<Expr> components;

  static SymVectorField from(SpacePtr chart, std::vector<Expr> components);
};

struct SymOneForm {
  SpacePtr chart;
  std::vector<Expr> coefficients;

  static SymOneForm zero(const SpacePtr& chart);
  static SymOneForm from(SpacePtr chart, std::vector<Expr> coefficients);
  friend bool operator==(const SymOneForm& a, const SymOneForm& b) {
    return a.coefficients == b.coefficients;
  }
};

/// Antisymmetric coefficients omega_{jk}; only j < k is stored.
class SymTwoForm {
 public:
  explicit SymTwoForm(SpacePtr chart);

  const SpacePtr& chart() const { return chart_; }
  int dim() const { return d_; }
  /// omega_{jk} with the antisymmetric sign; zero on the diagonal.
  Expr at(int j, int k) const;
  void set(int j, int k, Expr value);
  bool is_zero() const;
  const std::vector<Expr>& packed() const { return upper_; }

  friend bool operator==(const SymTwoForm& a, const SymTwoForm& b) { return a.upper_ == b.upper_; }

 private:
  SpacePtr chart_;
  int d_;
  std::vector<Expr> upper_;
};

struct ThreeFormEntry {
  int i, j, k;
  Expr value;
};

struct ClosednessReport {
  bool closed = true;
  std::vector<ThreeFormEntry> residual;  // nonzero entries only
};

ClosednessReport exterior_closed(const SymTwoForm& omega);
/// Nonzero entries of d(alpha)_{jk} = d_j alpha_k - d_k alpha_j.
SymTwoForm exterior_derivative(const SymOneForm& alpha);
SymOneForm exterior_derivative(const Expr& f, const SpacePtr& chart);

SymTwoForm lie_derivative(const SymVectorField& field, const SymTwoForm& omega);
SymOneForm contract(const SymVectorField& field, const SymTwoForm& omega);

struct ResidualEntry {
  std::vector<int> indices;
  Expr value;
};

/// Precondition failure of a homotopy: the input form is not closed.
class NotClosed : public std::domain_error {
 public:
  NotClosed(const std::string& what, std::vector<ResidualEntry> residual)
      : std::domain_error(what), residual_(std::move(residual)) {}
  const std::vector<ResidualEntry>& residual() const { return residual_; }

 private:
  std::vector<ResidualEntry> residual_;
};

/// E with dE = alpha (radial homotopy based at the origin).
Expr poincare_homotopy(const SymOneForm& alpha);
/// B with dB = omega (radial homotopy based at the origin).
SymOneForm poincare_homotopy(const SymTwoForm& omega);

struct DeterminantSample {
  std::vector<Rational> point;
  Rational determinant;
};

/// det(omega_{jk}) at seeded random rational points.
std::vector<DeterminantSample> nondegeneracy_samples(const SymTwoForm& omega, int count,
                                                    std::uint64_t seed);

struct FodeResult {
  SymOneForm potential;  // B, dB = omega
  Expr energy;           // E, dE = i_Gamma omega
  /// theta_j v^j - E on the tangent chart, theta = -B so that
  /// omega_L = -d theta_L equals omega.
  Expr lagrangian;
  /// Euler-Lagrange expressions of the Lagrangian along v = f(q).
  std::vector<Expr> residual;
  std::vector<DeterminantSample> determinant_samples;
};

/// Thrown when omega is not closed or L_Gamma omega != 0.
class FodeHypothesisError : public std::domain_error {
 public:
  FodeHypothesisError(const std::string& what, ClosednessReport closedness, SymTwoForm lie)
      : std::domain_error(what), closedness_(std::move(closedness)), lie_(std::move(lie)) {}
  const ClosednessReport& closedness() const { return closedness_; }
  const SymTwoForm& lie() const { return lie_; }

 private:
  ClosednessReport closedness_;
  SymTwoForm lie_;
};

FodeResult fode_lagrangian(const SymVectorField& field, const SymTwoForm& omega,
                           std::uint64_t seed = 1);

struct CartanData {
  SymOneForm theta;  // dL/dv^j dq^j on the tangent chart
  SymTwoForm omega;  // -d theta
  Expr energy;       // v^j dL/dv^j - L
};

/// lagrangian lives on a tangent chart of dimension 2d.
CartanData cartan_data(const Expr& lagrangian);

struct VerticalEntry {
  int j, k;  // velocity indices
  Expr value;
};

struct SodeReport {
  bool second_order = false;
  std::vector<int> second_order_failures;  // position indices with f^j != v^j
  SymTwoForm lie{nullptr};
  std::vector<VerticalEntry> vertical;  // nonzero omega(d/dv^j, d/dv^k)
  bool hypotheses_hold = false;
};

SodeReport sode_check(const SymVectorField& field, const SymTwoForm& omega);

/// Embed an expression on the base chart into its tangent chart.
Expr lift_to_tangent(const Expr& e, const SpacePtr& tangent);

}  // namespace varinv::mech
