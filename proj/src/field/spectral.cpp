#include "varinv/field/spectral.hpp"

#include <fftw3.h>

#include <algorithm>

namespace varinv::field {

namespace {

using cplx = std::complex<double>;

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

struct Spectral::Impl {
  int n;
  int nz;  // n/2 + 1 stored modes along z
  std::size_t real_size, half_size;
  std::unique_ptr<double, FftwDeleter> real;
  std::array<std::unique_ptr<fftw_complex, FftwDeleter>, 4> slot;
  fftw_plan forward_plan = nullptr, inverse_plan = nullptr;
  std::vector<double> k_full, k_half;  // effective wavenumbers
  std::vector<int> m_full;             // signed mode numbers

  explicit Impl(const GridSpec& g)
      : n(g.n),
        nz(g.n / 2 + 1),
        real_size(g.points()),
        half_size(static_cast<std::size_t>(g.n) * g.n * (g.n / 2 + 1)) {
    real.reset(static_cast<double*>(fftw_malloc(sizeof(double) * real_size)));
    for (auto& s : slot)
      s.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * half_size)));
    forward_plan = fftw_plan_dft_r2c_3d(n, n, n, real.get(), slot[0].get(), FFTW_ESTIMATE);
    inverse_plan = fftw_plan_dft_c2r_3d(n, n, n, slot[0].get(), real.get(), FFTW_ESTIMATE);
    const double unit = GridSpec::kTwoPi / g.length;
    for (int i = 0; i < n; ++i) {
      const int m = i <= n / 2 ? i : i - n;
      m_full.push_back(m);
      k_full.push_back(i == n / 2 ? 0.0 : unit * m);
    }
    for (int k = 0; k < nz; ++k) k_half.push_back(k == n / 2 ? 0.0 : unit * k);
  }

  ~Impl() {
    fftw_destroy_plan(forward_plan);
    fftw_destroy_plan(inverse_plan);
  }

  cplx* c(int s) { return reinterpret_cast<cplx*>(slot[s].get()); }

  void forward(const Lattice& f, int s) {
    std::copy(f.begin(), f.end(), real.get());
    fftw_execute_dft_r2c(forward_plan, real.get(), slot[s].get());
  }

  // Destroys slot s.
  Lattice inverse(int s) {
    fftw_execute_dft_c2r(inverse_plan, slot[s].get(), real.get());
    const double scale = 1.0 / static_cast<double>(real_size);
    Lattice out(real_size);
    for (std::size_t i = 0; i < real_size; ++i) out[i] = real.get()[i] * scale;
    return out;
  }

  template <class F>
  void for_modes(F&& f) {
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < nz; ++k, ++idx) f(idx, std::array<double, 3>{k_full[i], k_full[j], k_half[k]});
  }
};

Spectral::Spectral(const GridSpec& grid) : grid_(grid), impl_(std::make_unique<Impl>(grid)) {}
Spectral::~Spectral() = default;

VecField Spectral::grad(const Lattice& f) {
  require_points(f, grid_.points());
  auto& m = *impl_;
  m.forward(f, 0);
  VecField out;
  for (int a = 0; a < 3; ++a) {
    cplx* src = m.c(0);
    cplx* dst = m.c(1);
    m.for_modes([&](std::size_t idx, const std::array<double, 3>& k) {
      dst[idx] = cplx(0, k[a]) * src[idx];
    });
    out[a] = m.inverse(1);
  }
  return out;
}

Lattice Spectral::div(const VecField& v) {
  require_points(v, grid_.points());
  auto& m = *impl_;
  for (int a = 0; a < 3; ++a) m.forward(v[a], a);
  cplx *x = m.c(0), *y = m.c(1), *z = m.c(2), *d = m.c(3);
  m.for_modes([&](std::size_t idx, const std::array<double, 3>& k) {
    d[idx] = cplx(0, 1) * (k[0] * x[idx] + k[1] * y[idx] + k[2] * z[idx]);
  });
  return m.inverse(3);
}

VecField Spectral::curl(const VecField& v) {
  require_points(v, grid_.points());
  auto& m = *impl_;
  for (int a = 0; a < 3; ++a) m.forward(v[a], a);
  VecField out;
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    cplx *vb = m.c(b), *vc = m.c(c), *d = m.c(3);
    m.for_modes([&](std::size_t idx, const std::array<double, 3>& k) {
      d[idx] = cplx(0, 1) * (k[b] * vc[idx] - k[c] * vb[idx]);
    });
    out[a] = m.inverse(3);
  }
  return out;
}

Lattice Spectral::laplacian(const Lattice& f) {
  require_points(f, grid_.points());
  auto& m = *impl_;
  m.forward(f, 0);
  cplx* s = m.c(0);
  m.for_modes([&](std::size_t idx, const std::array<double, 3>& k) {
    s[idx] *= -(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
  });
  return m.inverse(0);
}

Projection Spectral::helmholtz_project(const VecField& v) {
  require_points(v, grid_.points());
  auto& m = *impl_;
  for (int a = 0; a < 3; ++a) m.forward(v[a], a);
  cplx *x = m.c(0), *y = m.c(1), *z = m.c(2), *p = m.c(3);
  m.for_modes([&](std::size_t idx, const std::array<double, 3>& k) {
    const double kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (kk == 0) {
      p[idx] = 0;
      return;
    }
    const cplx kv = k[0] * x[idx] + k[1] * y[idx] + k[2] * z[idx];
    p[idx] = cplx(0, -1) * kv / kk;
    x[idx] -= k[0] * kv / kk;
    y[idx] -= k[1] * kv / kk;
    z[idx] -= k[2] * kv / kk;
  });
  Projection out;
  for (int a = 0; a < 3; ++a) out.div_free[a] = m.inverse(a);
  out.psi = m.inverse(3);
  return out;
}

VecField Spectral::maxwell_force(const VecField& a) {
  require_points(a, grid_.points());
  auto& m = *impl_;
  for (int c = 0; c < 3; ++c) m.forward(a[c], c);
  cplx *x = m.c(0), *y = m.c(1), *z = m.c(2);
  m.for_modes([&](std::size_t idx, const std::array<double, 3>& k) {
    const double kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    const cplx kv = k[0] * x[idx] + k[1] * y[idx] + k[2] * z[idx];
    x[idx] = -kk * x[idx] + k[0] * kv;
    y[idx] = -kk * y[idx] + k[1] * kv;
    z[idx] = -kk * z[idx] + k[2] * kv;
  });
  VecField out;
  for (int c = 0; c < 3; ++c) out[c] = m.inverse(c);
  return out;
}

Lattice Spectral::synthesize(const std::function<std::complex<double>(int, int, int)>& coeff) {
  auto& m = *impl_;
  cplx* s = m.c(0);
  std::size_t idx = 0;
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j)
      for (int k = 0; k < m.nz; ++k, ++idx) s[idx] = coeff(m.m_full[i], m.m_full[j], k);
  return m.inverse(0);
}

}  // namespace varinv::field
