#pragma once

// Fourier-space derivatives on the periodic lattice. The Nyquist wavenumber
// is treated as zero by every operator, so div(grad) equals the Laplacian
// and div(curl) vanishes to roundoff.

#include <complex>
#include <functional>
#include <memory>

#include "varinv/field/grid.hpp"

namespace varinv::field {

struct Projection {
  VecField div_free;
  Lattice psi;  // zero-mean potential of the gradient part
};

class Spectral {
 public:
  explicit Spectral(const GridSpec& grid);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  const GridSpec& grid() const { return grid_; }

  VecField grad(const Lattice& f);
  Lattice div(const VecField& v);
  VecField curl(const VecField& v);
  Lattice laplacian(const Lattice& f);
  /// V = div_free + grad psi; the mean mode stays in div_free.
  Projection helmholtz_project(const VecField& v);
  /// Laplacian(A) - grad div A.
  VecField maxwell_force(const VecField& a);

  /// Real lattice whose half-spectrum is coeff(mx, my, mz) on the stored
  /// modes (mz >= 0); modes are signed integers.
  Lattice synthesize(const std::function<std::complex<double>(int, int, int)>& coeff);

 private:
  struct Impl;
  GridSpec grid_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace varinv::field
