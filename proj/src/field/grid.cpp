#include "varinv/field/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace varinv::field {

GridSpec GridSpec::make(int n, double dt, double length) {
  if (n < 8 || (n & (n - 1)) != 0)
    throw ConfigError("grid size must be a power of two and at least 8, got " + std::to_string(n));
  if (!(length > 0) || !std::isfinite(length)) throw ConfigError("box length must be positive");
  GridSpec g{n, length, dt};
  if (!(dt > 0) || !std::isfinite(dt)) throw ConfigError("time step must be positive");
  if (dt > 0.2 * g.dx())
    throw ConfigError("time step " + std::to_string(dt) + " exceeds the stability bound 0.2*dx = " +
                      std::to_string(0.2 * g.dx()));
  return g;
}

VecField VecField::zeros(std::size_t points) {
  VecField v;
  for (auto& c : v.c) c.assign(points, 0.0);
  return v;
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    carry_ += (sum_ - t) + x;
  else
    carry_ += (x - t) + sum_;
  sum_ = t;
}

double maxnorm(const Lattice& f) {
  double m = 0;
  for (double x : f) m = std::max(m, std::abs(x));
  return m;
}

double maxnorm(const VecField& v) {
  return std::max({maxnorm(v[0]), maxnorm(v[1]), maxnorm(v[2])});
}

double dot(const Lattice& a, const Lattice& b) {
  if (a.size() != b.size()) throw ShapeError("lattice sizes differ");
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value();
}

double dot(const VecField& a, const VecField& b) {
  if (a.points() != b.points()) throw ShapeError("vector field sizes differ");
  CompensatedSum s;
  for (std::size_t i = 0; i < a.points(); ++i)
    for (int k = 0; k < 3; ++k) s.add(a[k][i] * b[k][i]);
  return s.value();
}

double mean(const Lattice& f) {
  CompensatedSum s;
  for (double x : f) s.add(x);
  return f.empty() ? 0.0 : s.value() / static_cast<double>(f.size());
}

Lattice difference(const Lattice& a, const Lattice& b) {
  if (a.size() != b.size()) throw ShapeError("lattice sizes differ");
  Lattice d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

VecField difference(const VecField& a, const VecField& b) {
  VecField d;
  for (int k = 0; k < 3; ++k) d[k] = difference(a[k], b[k]);
  return d;
}

void require_points(const Lattice& f, std::size_t points) {
  if (f.size() != points)
    throw ShapeError("lattice has " + std::to_string(f.size()) + " points, grid has " +
                     std::to_string(points));
}

void require_points(const VecField& v, std::size_t points) {
  for (const auto& c : v.c) require_points(c, points);
}

}  // namespace varinv::field
