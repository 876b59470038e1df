#pragma once

// Periodic cubic lattice, real scalar/vector samples and deterministic
// reductions over them.

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace varinv::field {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GridSpec {
  int n = 16;
  double length = 0;
  double dt = 0;

  /// Validates n (power of two, >= 8), length > 0 and 0 < dt <= 0.2 dx.
  static GridSpec make(int n, double dt, double length = kTwoPi);

  double dx() const { return length / n; }
  double cell_volume() const { return dx() * dx() * dx(); }
  std::size_t points() const { return static_cast<std::size_t>(n) * n * n; }
  /// Flat index of lattice site (i, j, k) along (x, y, z).
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n + j) * n + k;
  }

  static constexpr double kTwoPi = 6.283185307179586476925286766559;
};

using Lattice = std::vector<double>;

struct VecField {
  std::array<Lattice, 3> c;

  static VecField zeros(std::size_t points);
  std::size_t points() const { return c[0].size(); }
  Lattice& operator[](int k) { return c[k]; }
  const Lattice& operator[](int k) const { return c[k]; }
  friend bool operator==(const VecField&, const VecField&) = default;
};

/// Neumaier-compensated running sum; the caller fixes the order.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0;
  double carry_ = 0;
};

double maxnorm(const Lattice& f);
double maxnorm(const VecField& v);
/// Lattice-major sum of a.b, compensated, without the cell volume.
double dot(const Lattice& a, const Lattice& b);
double dot(const VecField& a, const VecField& b);
double mean(const Lattice& f);

Lattice difference(const Lattice& a, const Lattice& b);
VecField difference(const VecField& a, const VecField& b);

void require_points(const Lattice& f, std::size_t points);
void require_points(const VecField& v, std::size_t points);

}  // namespace varinv::field
