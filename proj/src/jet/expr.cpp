#include "varinv/jet/expr.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace varinv::jet {

MultiIndex::MultiIndex(std::vector<int> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
}

MultiIndex MultiIndex::with(int j) const {
  MultiIndex r = *this;
  r.indices_.insert(std::upper_bound(r.indices_.begin(), r.indices_.end(), j), j);
  return r;
}

MultiIndex MultiIndex::merged(const MultiIndex& other) const {
  std::vector<int> all = indices_;
  all.insert(all.end(), other.indices_.begin(), other.indices_.end());
  return MultiIndex(std::move(all));
}

mpz_class MultiIndex::orderings() const {
  mpz_class num;
  mpz_fac_ui(num.get_mpz_t(), indices_.size());
  std::size_t i = 0;
  while (i < indices_.size()) {
    std::size_t run = 1;
    while (i + run < indices_.size() && indices_[i + run] == indices_[i]) ++run;
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), run);
    num /= f;
    i += run;
  }
  return num;
}

std::vector<MultiIndex> multi_indices(int n, int order) {
  std::vector<MultiIndex> out;
  if (order == 0) {
    out.emplace_back();
    return out;
  }
  if (n <= 0) return out;
  std::vector<int> cur(order, 0);
  while (true) {
    out.emplace_back(cur);
    int pos = order - 1;
    while (pos >= 0 && cur[pos] == n - 1) --pos;
    if (pos < 0) break;
    ++cur[pos];
    for (int q = pos + 1; q < order; ++q) cur[q] = cur[pos];
  }
  return out;
}

namespace {

bool valid_ident(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
}

}  // namespace

SpacePtr make_space(std::vector<std::string> independents,
                    std::vector<std::string> dependents, int order) {
  if (dependents.empty()) throw DomainError("jet space needs at least one dependent variable");
  if (order < 0) throw DomainError("jet order must be nonnegative");
  if (independents.empty() && order != 0)
    throw DomainError("a jet space without independent variables must have order 0");
  std::set<std::string> seen;
  for (const auto* family : {&independents, &dependents}) {
    for (const auto& name : *family) {
      if (!valid_ident(name)) throw DomainError("invalid variable name '" + name + "'");
      if (!seen.insert(name).second) throw DomainError("duplicate variable name '" + name + "'");
    }
  }
  for (const auto& name : independents)
    if (name.size() != 1) throw DomainError("independent variable '" + name + "' must be a single letter");
  return std::make_shared<const JetSpace>(
      JetSpace{std::move(independents), std::move(dependents), order});
}

SpacePtr with_order(const SpacePtr& space, int order) {
  if (space->order == order) return space;
  return make_space(space->independents, space->dependents, order);
}

std::strong_ordering JetVar::operator<=>(const JetVar& o) const {
  if (kind_ != o.kind_) return kind_ <=> o.kind_;
  if (kind_ == Kind::Independent) return index_ <=> o.index_;
  if (auto c = index_ <=> o.index_; c != 0) return c;
  if (auto c = mi_.order() <=> o.mi_.order(); c != 0) return c;
  return mi_ <=> o.mi_;
}

std::string var_name(const JetSpace& space, const JetVar& v) {
  if (v.is_independent()) return space.independents.at(v.index());
  std::string s = space.dependents.at(v.index());
  if (!v.multi_index().empty()) {
    s += '_';
    for (int j : v.multi_index().indices()) s += space.independents.at(j);
  }
  return s;
}

void check_var(const JetSpace& space, const JetVar& v) {
  if (v.is_independent()) {
    if (v.index() < 0 || v.index() >= space.n())
      throw DomainError("independent variable index out of range");
    return;
  }
  if (v.index() < 0 || v.index() >= space.l())
    throw DomainError("dependent variable index out of range");
  if (v.order() > space.order) throw DomainError("jet variable exceeds the order of the space");
  for (int j : v.multi_index().indices())
    if (j < 0 || j >= space.n()) throw DomainError("multi-index entry out of range");
}

// --- Monomial ---------------------------------------------------------------

Monomial::Monomial(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end(),
            [](const Factor& a, const Factor& b) { return a.first < b.first; });
  for (auto& f : factors) {
    if (f.second == 0) continue;
    if (!factors_.empty() && factors_.back().first == f.first)
      factors_.back().second += f.second;
    else
      factors_.push_back(std::move(f));
  }
}

Monomial Monomial::of(const JetVar& v, unsigned exponent) {
  return Monomial({{v, exponent}});
}

unsigned Monomial::degree() const {
  unsigned d = 0;
  for (const auto& [v, e] : factors_) d += e;
  return d;
}

unsigned Monomial::jet_degree() const {
  unsigned d = 0;
  for (const auto& [v, e] : factors_)
    if (!v.is_independent()) d += e;
  return d;
}

unsigned Monomial::exponent(const JetVar& v) const {
  for (const auto& [w, e] : factors_)
    if (w == v) return e;
  return 0;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial r;
  auto a = factors_.begin();
  auto b = other.factors_.begin();
  while (a != factors_.end() || b != other.factors_.end()) {
    if (b == other.factors_.end() || (a != factors_.end() && a->first < b->first)) {
      r.factors_.push_back(*a++);
    } else if (a == factors_.end() || b->first < a->first) {
      r.factors_.push_back(*b++);
    } else {
      r.factors_.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  return r;
}

Monomial Monomial::reduced(const JetVar& v) const {
  Monomial r = *this;
  for (auto it = r.factors_.begin(); it != r.factors_.end(); ++it) {
    if (it->first == v) {
      if (--it->second == 0) r.factors_.erase(it);
      return r;
    }
  }
  throw DomainError("variable not present in monomial");
}

bool GradedLex::operator()(const Monomial& a, const Monomial& b) const {
  const unsigned da = a.degree();
  const unsigned db = b.degree();
  if (da != db) return da < db;
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  for (std::size_t i = 0; i < fa.size() && i < fb.size(); ++i) {
    if (fa[i].first != fb[i].first) {
      // The monomial carrying the earlier variable is the larger one.
      return fb[i].first < fa[i].first;
    }
    if (fa[i].second != fb[i].second) return fa[i].second < fb[i].second;
  }
  return false;
}

// --- Expr -------------------------------------------------------------------

Expr::Expr(SpacePtr space, const Rational& c) : space_(std::move(space)) {
  if (c != 0) terms_.emplace(Monomial{}, c);
}

Expr Expr::from_terms(SpacePtr space,
                      const std::vector<std::pair<Monomial, Rational>>& terms) {
  Expr e(std::move(space));
  for (const auto& [m, c] : terms) {
    for (const auto& [v, p] : m.factors()) check_var(*e.space_, v);
    e.add_term(m, c);
  }
  return e;
}

Expr Expr::variable(SpacePtr space, const JetVar& v) {
  check_var(*space, v);
  Expr e(std::move(space));
  e.terms_.emplace(Monomial::of(v), Rational(1));
  return e;
}

int Expr::max_order() const {
  int k = 0;
  for (const auto& [m, c] : terms_)
    for (const auto& [v, p] : m.factors()) k = std::max(k, v.order());
  return k;
}

Expr Expr::in_space(SpacePtr space) const {
  if (!space->compatible(*space_)) throw DomainError("incompatible jet spaces");
  for (const auto& [m, c] : terms_)
    for (const auto& [v, p] : m.factors()) check_var(*space, v);
  Expr e(std::move(space));
  e.terms_ = terms_;
  return e;
}

void Expr::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

namespace {

SpacePtr joined(const SpacePtr& a, const SpacePtr& b) {
  if (a == b) return a;
  if (!a->compatible(*b)) throw DomainError("incompatible jet spaces");
  return a->order >= b->order ? a : b;
}

}  // namespace

Expr Expr::operator-() const {
  Expr r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

Expr& Expr::operator+=(const Expr& o) {
  space_ = joined(space_, o.space_);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Expr& Expr::operator-=(const Expr& o) {
  space_ = joined(space_, o.space_);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Expr& Expr::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, coeff] : terms_) coeff *= c;
  return *this;
}

Expr operator*(const Expr& a, const Expr& b) {
  Expr r(joined(a.space_, b.space_));
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
  return r;
}

Expr Expr::pow(unsigned e) const {
  Expr r(space_, Rational(1));
  Expr base = *this;
  while (e > 0) {
    if (e & 1U) r = r * base;
    e >>= 1U;
    if (e > 0) base = base * base;
  }
  return r;
}

// --- operations -------------------------------------------------------------

Expr partial_derivative(const Expr& e, const JetVar& v) {
  check_var(*e.space(), v);
  std::vector<std::pair<Monomial, Rational>> out;
  for (const auto& [m, c] : e.terms()) {
    const unsigned p = m.exponent(v);
    if (p == 0) continue;
    out.emplace_back(m.reduced(v), c * p);
  }
  return Expr::from_terms(e.space(), out);
}

std::vector<std::pair<unsigned, Expr>> scale_dependent(const Expr& e) {
  std::map<unsigned, std::vector<std::pair<Monomial, Rational>>> by_degree;
  for (const auto& [m, c] : e.terms()) by_degree[m.jet_degree()].emplace_back(m, c);
  std::vector<std::pair<unsigned, Expr>> out;
  for (auto it = by_degree.rbegin(); it != by_degree.rend(); ++it)
    out.emplace_back(it->first, Expr::from_terms(e.space(), it->second));
  return out;
}

Rational eval_at_point(const Expr& e, const std::map<JetVar, Rational>& assignment) {
  Rational total = 0;
  for (const auto& [m, c] : e.terms()) {
    Rational term = c;
    for (const auto& [v, p] : m.factors()) {
      auto it = assignment.find(v);
      if (it == assignment.end())
        throw DomainError("no value assigned to '" + var_name(*e.space(), v) + "'");
      Rational power = 1;
      for (unsigned i = 0; i < p; ++i) power *= it->second;
      term *= power;
    }
    total += term;
  }
  return total;
}

Expr substitute(const Expr& e, const std::map<JetVar, Expr>& replacement,
                const SpacePtr& target) {
  Expr out(target);
  for (const auto& [m, c] : e.terms()) {
    Expr term(target, c);
    std::vector<std::pair<Monomial, Rational>> kept;
    Monomial rest;
    for (const auto& [v, p] : m.factors()) {
      auto it = replacement.find(v);
      if (it == replacement.end()) {
        rest = rest * Monomial::of(v, p);
      } else {
        term = term * it->second.pow(p);
      }
    }
    kept.emplace_back(rest, Rational(1));
    out += term * Expr::from_terms(target, kept);
  }
  return out;
}

}  // namespace varinv::jet
