#pragma once

// Exact polynomial expressions over jet coordinates x^j, y^s_J.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace varinv::jet {

using Rational = mpq_class;

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Sorted list of independent-variable indices (0-based). Empty means the
/// bare dependent variable.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> indices);

  const std::vector<int>& indices() const { return indices_; }
  int order() const { return static_cast<int>(indices_.size()); }
  bool empty() const { return indices_.empty(); }

  /// J ∪ {j}, re-sorted.
  MultiIndex with(int j) const;
  MultiIndex merged(const MultiIndex& other) const;

  /// Number of distinct orderings of the index tuple (multinomial).
  mpz_class orderings() const;

  auto operator<=>(const MultiIndex&) const = default;

 private:
  std::vector<int> indices_;
};

/// All sorted multi-indices of the given order over n independent variables,
/// in lexicographic order.
std::vector<MultiIndex> multi_indices(int n, int order);

struct JetSpace {
  std::vector<std::string> independents;
  std::vector<std::string> dependents;
  int order = 0;

  int n() const { return static_cast<int>(independents.size()); }
  int l() const { return static_cast<int>(dependents.size()); }

  /// Same variable families (order may differ).
  bool compatible(const JetSpace& other) const {
    return independents == other.independents && dependents == other.dependents;
  }
  bool operator==(const JetSpace&) const = default;
};

using SpacePtr = std::shared_ptr<const JetSpace>;

/// Validates names and sizes; throws DomainError.
SpacePtr make_space(std::vector<std::string> independents,
                    std::vector<std::string> dependents, int order);
SpacePtr with_order(const SpacePtr& space, int order);

class JetVar {
 public:
  enum class Kind : std::uint8_t { Independent, Jet };

  static JetVar independent(int j) { return JetVar(Kind::Independent, j, {}); }
  static JetVar jet(int sigma, MultiIndex mi = {}) {
    return JetVar(Kind::Jet, sigma, std::move(mi));
  }

  Kind kind() const { return kind_; }
  bool is_independent() const { return kind_ == Kind::Independent; }
  /// j for x^j, sigma for y^sigma_J.
  int index() const { return index_; }
  const MultiIndex& multi_index() const { return mi_; }
  int order() const { return mi_.order(); }

  // Enumeration: independents by index, then jets by (sigma, order, J).
  std::strong_ordering operator<=>(const JetVar& o) const;
  bool operator==(const JetVar& o) const = default;

 private:
  JetVar(Kind kind, int index, MultiIndex mi)
      : kind_(kind), index_(index), mi_(std::move(mi)) {}

  Kind kind_;
  int index_;
  MultiIndex mi_;
};

std::string var_name(const JetSpace& space, const JetVar& v);

/// Variables with positive exponents, sorted by JetVar.
class Monomial {
 public:
  using Factor = std::pair<JetVar, unsigned>;

  Monomial() = default;
  explicit Monomial(std::vector<Factor> factors);
  static Monomial of(const JetVar& v, unsigned exponent = 1);

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_constant() const { return factors_.empty(); }
  unsigned degree() const;
  /// Total degree in jet variables only (independents excluded).
  unsigned jet_degree() const;
  unsigned exponent(const JetVar& v) const;

  Monomial operator*(const Monomial& other) const;
  /// Removes one power of v; v must be present.
  Monomial reduced(const JetVar& v) const;

  bool operator==(const Monomial&) const = default;

 private:
  std::vector<Factor> factors_;
};

/// Graded lexicographic order; "less" puts lower total degree first.
struct GradedLex {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

class Expr {
 public:
  using Terms = std::map<Monomial, Rational, GradedLex>;

  explicit Expr(SpacePtr space) : space_(std::move(space)) {}
  Expr(SpacePtr space, const Rational& c);
  /// Normalizes: merges duplicates and drops zero coefficients.
  static Expr from_terms(SpacePtr space,
                         const std::vector<std::pair<Monomial, Rational>>& terms);
  static Expr variable(SpacePtr space, const JetVar& v);
  static Expr constant(SpacePtr space, const Rational& c) { return Expr(std::move(space), c); }

  const SpacePtr& space() const { return space_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  /// Highest derivative order among occurring jet variables (0 if none).
  int max_order() const;

  /// Same terms in another compatible space; throws if a variable does not fit.
  Expr in_space(SpacePtr space) const;

  Expr operator-() const;
  Expr& operator+=(const Expr& o);
  Expr& operator-=(const Expr& o);
  Expr& operator*=(const Rational& c);
  friend Expr operator+(Expr a, const Expr& b) { return a += b; }
  friend Expr operator-(Expr a, const Expr& b) { return a -= b; }
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator*(Expr a, const Rational& c) { return a *= c; }
  friend Expr operator*(const Rational& c, Expr a) { return a *= c; }
  Expr pow(unsigned e) const;

  /// Structural equality of the term maps.
  friend bool operator==(const Expr& a, const Expr& b) { return a.terms_ == b.terms_; }

 private:
  void add_term(const Monomial& m, const Rational& c);

  SpacePtr space_;
  Terms terms_;
};

/// Throws DomainError when v does not belong to e's space.
void check_var(const JetSpace& space, const JetVar& v);

Expr partial_derivative(const Expr& e, const JetVar& v);

/// Homogeneous components by jet-degree d (y^s_J -> t y^s_J gives t^d),
/// highest degree first; independents are not scaled.
std::vector<std::pair<unsigned, Expr>> scale_dependent(const Expr& e);

Rational eval_at_point(const Expr& e, const std::map<JetVar, Rational>& assignment);

/// Simultaneous substitution of variables by expressions (in the target space).
Expr substitute(const Expr& e, const std::map<JetVar, Expr>& replacement,
                const SpacePtr& target);

}  // namespace varinv::jet
