#include "varinv/field/maxwell.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace varinv::field {

namespace {

void axpy(Lattice& y, double a, const Lattice& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void axpy(VecField& y, double a, const VecField& x) {
  for (int k = 0; k < 3; ++k) axpy(y[k], a, x[k]);
}

void scale(Lattice& f, double s) {
  for (double& x : f) x *= s;
}

bool in_shell(int mx, int my, int mz, double cutoff) {
  const int mm = mx * mx + my * my + mz * mz;
  return mm > 0 && mm <= cutoff * cutoff;
}

Lattice random_band(Spectral& spectral, std::mt19937_64& rng, double cutoff) {
  std::normal_distribution<double> normal;
  return spectral.synthesize([&](int mx, int my, int mz) -> std::complex<double> {
    if (!in_shell(mx, my, mz, cutoff)) return 0.0;
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
  });
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint64_t out;
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  out = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  return out;
}

// Leapfrog on a Maxwell state; the end-of-step force is kept for the next step.
class Kdk {
 public:
  Kdk(Spectral& spectral, VecField& A, VecField& E, const Gauge& g)
      : spectral_(spectral), A_(A), E_(E), g_(g), dt_(spectral.grid().dt) {
    if (!g.zero) gphi_ = spectral.grad(g.phi);
    F_ = spectral.maxwell_force(A);
  }

  /// drift adds dt * E (plus dt * grad phi when include_gauge) to A.
  void advance(bool include_gauge) {
    axpy(E_, 0.5 * dt_, F_);
    axpy(A_, dt_, E_);
    if (include_gauge && !g_.zero) axpy(A_, dt_, gphi_);
    F_ = spectral_.maxwell_force(A_);
    axpy(E_, 0.5 * dt_, F_);
  }

 private:
  Spectral& spectral_;
  VecField& A_;
  VecField& E_;
  const Gauge& g_;
  double dt_;
  VecField gphi_, F_;
};

}  // namespace

MaxwellState MaxwellState::zeros(const GridSpec& grid) {
  return {VecField::zeros(grid.points()), VecField::zeros(grid.points())};
}

ExtendedState ExtendedState::zeros(const GridSpec& grid) {
  return {VecField::zeros(grid.points()), VecField::zeros(grid.points()),
          Lattice(grid.points(), 0.0), Lattice(grid.points(), 0.0)};
}

Gauge Gauge::none(const GridSpec& grid) { return {Lattice(grid.points(), 0.0), "zero", true}; }

Gauge Gauge::random_smooth(Spectral& spectral, std::uint64_t seed, double cutoff) {
  std::ostringstream p;
  p << "random:" << seed << "," << cutoff;
  return from_lattice(random_scalar(spectral, seed, cutoff), p.str());
}

Gauge Gauge::from_lattice(Lattice phi, std::string provenance) {
  const double m = mean(phi);
  bool zero = true;
  for (double& x : phi) {
    x -= m;
    if (x != 0) zero = false;
  }
  return {std::move(phi), std::move(provenance), zero};
}

MaxwellState standing_wave(const GridSpec& grid, std::array<int, 3> mode, double amp) {
  const double mm = mode[0] * mode[0] + mode[1] * mode[1] + mode[2] * mode[2];
  if (mm == 0) throw ConfigError("standing wave needs a nonzero mode");
  for (int m : mode)
    if (2 * std::abs(m) >= grid.n) throw ConfigError("standing wave mode is not resolved by the grid");
  // polarization: the axis with the smallest |m|, made orthogonal to m
  int axis = 0;
  for (int a = 1; a < 3; ++a)
    if (std::abs(mode[a]) < std::abs(mode[axis])) axis = a;
  std::array<double, 3> e{};
  e[axis] = 1;
  const double proj = mode[axis] / mm;
  for (int a = 0; a < 3; ++a) e[a] -= proj * mode[a];
  const double norm = std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]);
  for (double& x : e) x /= norm;

  MaxwellState s = MaxwellState::zeros(grid);
  const double unit = GridSpec::kTwoPi / grid.length;
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j)
      for (int k = 0; k < grid.n; ++k) {
        const double phase = unit * grid.dx() * (mode[0] * i + mode[1] * j + mode[2] * k);
        const double v = amp * std::sin(phase);
        for (int a = 0; a < 3; ++a) s.A[a][grid.index(i, j, k)] = e[a] * v;
      }
  return s;
}

VecField random_solenoidal(Spectral& spectral, std::uint64_t seed, double cutoff) {
  if (!(cutoff >= 1)) throw ConfigError("random field cutoff must be at least 1");
  std::mt19937_64 rng(seed);
  VecField raw;
  for (int a = 0; a < 3; ++a) raw[a] = random_band(spectral, rng, cutoff);
  VecField v = spectral.helmholtz_project(raw).div_free;
  const double m = maxnorm(v);
  for (int a = 0; a < 3; ++a) scale(v[a], 1.0 / m);
  return v;
}

Lattice random_scalar(Spectral& spectral, std::uint64_t seed, double cutoff) {
  if (!(cutoff >= 1)) throw ConfigError("random field cutoff must be at least 1");
  std::mt19937_64 rng(seed);
  Lattice f = random_band(spectral, rng, cutoff);
  const double mu = mean(f);
  for (double& x : f) x -= mu;
  scale(f, 1.0 / maxnorm(f));
  return f;
}

MaxwellState random_state(Spectral& spectral, std::uint64_t seed, double cutoff) {
  return {random_solenoidal(spectral, mix(seed, 1), cutoff),
          random_solenoidal(spectral, mix(seed, 2), cutoff)};
}

MaxwellState initial_condition(const std::string& spec, Spectral& spectral) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("initial condition needs a kind prefix: " + spec);
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (kind == "file") {
    auto [grid, state] = read_snapshot(rest);
    const auto& g = spectral.grid();
    if (grid.n != g.n || grid.length != g.length)
      throw ConfigError("snapshot grid does not match the simulation grid");
    return state;
  }
  std::vector<std::string> parts;
  std::stringstream ss(rest);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  auto number = [&](std::size_t i) {
    try {
      std::size_t used = 0;
      double v = std::stod(parts.at(i), &used);
      if (used != parts[i].size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("malformed initial condition: " + spec);
    }
  };
  auto integer = [&](std::size_t i) {
    const double v = number(i);
    if (v != std::floor(v)) throw ConfigError("expected an integer in: " + spec);
    return static_cast<long long>(v);
  };
  if (kind == "standing-wave") {
    if (parts.size() != 4) throw ConfigError("standing-wave expects kx,ky,kz,amp");
    return standing_wave(spectral.grid(),
                         {static_cast<int>(integer(0)), static_cast<int>(integer(1)),
                          static_cast<int>(integer(2))},
                         number(3));
  }
  if (kind == "random") {
    if (parts.size() != 2) throw ConfigError("random expects seed,cutoff");
    const long long seed = integer(0);
    if (seed < 0) throw ConfigError("random seed must be nonnegative");
    return random_state(spectral, static_cast<std::uint64_t>(seed), number(1));
  }
  throw ConfigError("unknown initial condition kind '" + kind + "'");
}

MaxwellState project_gauss(Spectral& spectral, MaxwellState s) {
  s.E = spectral.helmholtz_project(s.E).div_free;
  return s;
}

ExtendedState extend(Spectral& spectral, const MaxwellState& s, Lattice mu) {
  auto p = spectral.helmholtz_project(s.A);
  if (mu.empty()) mu.assign(spectral.grid().points(), 0.0);
  require_points(mu, spectral.grid().points());
  return {std::move(p.div_free), s.E, std::move(p.psi), std::move(mu)};
}

MaxwellState reduce(Spectral& spectral, const ExtendedState& s) {
  MaxwellState out{s.A_tilde, s.E};
  axpy(out.A, 1.0, spectral.grad(s.psi));
  return out;
}

std::pair<VecField, VecField> maxwell_rhs(Spectral& spectral, const MaxwellState& s,
                                          const Gauge& g) {
  VecField dA = s.E;
  if (!g.zero) axpy(dA, 1.0, spectral.grad(g.phi));
  return {std::move(dA), spectral.maxwell_force(s.A)};
}

void Integrator::evolve(MaxwellState& s, const Gauge& g, long steps,
                        const MaxwellObserver& observe) {
  require_points(s.A, grid().points());
  require_points(s.E, grid().points());
  Kdk kdk(spectral_, s.A, s.E, g);
  for (long n = 1; n <= steps; ++n) {
    kdk.advance(true);
    if (observe) observe(n, s);
  }
}

void Integrator::evolve(ExtendedState& s, const Gauge& g, long steps,
                        const ExtendedObserver& observe) {
  require_points(s.A_tilde, grid().points());
  require_points(s.E, grid().points());
  require_points(s.psi, grid().points());
  require_points(s.mu, grid().points());
  Kdk kdk(spectral_, s.A_tilde, s.E, g);
  const double dt = grid().dt;
  for (long n = 1; n <= steps; ++n) {
    kdk.advance(false);
    if (!g.zero) axpy(s.psi, dt, g.phi);
    if (observe) observe(n, s);
  }
}

double energy(Spectral& spectral, const MaxwellState& s) {
  const VecField B = spectral.curl(s.A);
  CompensatedSum sum;
  for (std::size_t i = 0; i < s.E.points(); ++i) {
    for (int k = 0; k < 3; ++k) sum.add(0.5 * s.E[k][i] * s.E[k][i]);
    for (int k = 0; k < 3; ++k) sum.add(0.5 * B[k][i] * B[k][i]);
  }
  return sum.value() * spectral.grid().cell_volume();
}

double energy(Spectral& spectral, const ExtendedState& s) {
  return energy(spectral, MaxwellState{s.A_tilde, s.E});
}

double gauss_residual(Spectral& spectral, const VecField& E) { return maxnorm(spectral.div(E)); }

double omega_pairing(const GridSpec& grid, const ExtendedState& d1, const ExtendedState& d2) {
  const std::size_t pts = grid.points();
  for (const auto* d : {&d1, &d2}) {
    require_points(d->A_tilde, pts);
    require_points(d->E, pts);
  }
  CompensatedSum sum;
  for (std::size_t i = 0; i < pts; ++i)
    for (int k = 0; k < 3; ++k)
      sum.add(d1.A_tilde[k][i] * d2.E[k][i] - d2.A_tilde[k][i] * d1.E[k][i]);
  return sum.value() * grid.cell_volume();
}

double symplectic_product(Spectral& spectral, const ExtendedState& d1, const ExtendedState& d2) {
  const auto& grid = spectral.grid();
  const double omega = omega_pairing(grid, d1, d2);
  for (const auto* d : {&d1, &d2}) {
    require_points(d->psi, grid.points());
    require_points(d->mu, grid.points());
  }
  const VecField m1 = spectral.grad(d1.mu), m2 = spectral.grad(d2.mu);
  const VecField p1 = spectral.grad(d1.psi), p2 = spectral.grad(d2.psi);
  CompensatedSum sum;
  for (std::size_t i = 0; i < grid.points(); ++i)
    for (int k = 0; k < 3; ++k) sum.add(m1[k][i] * p2[k][i] - m2[k][i] * p1[k][i]);
  return omega + sum.value() * grid.cell_volume();
}

std::vector<PairingDrift> flow_preserves_form(Integrator& integrator, ExtendedState& state,
                                              const Gauge& g, std::vector<SymplecticSample> pairs,
                                              long steps, long check_every) {
  auto& spectral = integrator.spectral();
  const Gauge none = Gauge::none(integrator.grid());
  std::vector<PairingDrift> out;
  for (const auto& p : pairs) {
    const double v = symplectic_product(spectral, p.d1, p.d2);
    out.push_back({p.label, v, v, 0.0});
  }
  if (check_every < 1) check_every = steps;
  for (long done = 0; done < steps;) {
    const long chunk = std::min(check_every, steps - done);
    integrator.evolve(state, g, chunk);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      integrator.evolve(pairs[i].d1, none, chunk);
      integrator.evolve(pairs[i].d2, none, chunk);
      const double v = symplectic_product(spectral, pairs[i].d1, pairs[i].d2);
      auto& r = out[i];
      r.final = v;
      const double diff = std::abs(v - r.initial);
      const double rel = r.initial != 0 ? diff / std::abs(r.initial) : diff;
      r.max_relative_drift = std::max(r.max_relative_drift, rel);
    }
    done += chunk;
  }
  return out;
}

GaugeComparison gauge_compare(Integrator& integrator, const MaxwellState& s0, const Gauge& g1,
                              const Gauge& g2, long steps) {
  auto& spectral = integrator.spectral();
  MaxwellState a = s0, b = s0;
  Kdk ka(spectral, a.A, a.E, g1);
  Kdk kb(spectral, b.A, b.E, g2);
  GaugeComparison r;
  auto observe = [&] {
    const VecField Ba = spectral.curl(a.A), Bb = spectral.curl(b.A);
    r.field_scale = std::max({r.field_scale, maxnorm(a.E), maxnorm(b.E), maxnorm(Ba), maxnorm(Bb)});
    r.max_E_difference = std::max(r.max_E_difference, maxnorm(difference(a.E, b.E)));
    r.max_B_difference = std::max(r.max_B_difference, maxnorm(difference(Ba, Bb)));
  };
  observe();
  for (long n = 0; n < steps; ++n) {
    ka.advance(true);
    kb.advance(true);
    observe();
  }
  const VecField dA = difference(a.A, b.A);
  r.A_difference = maxnorm(dA);
  r.A_difference_div_free = maxnorm(spectral.helmholtz_project(dA).div_free);
  return r;
}

namespace {

constexpr const char* kFieldNames[6] = {"A_x", "A_y", "A_z", "E_x", "E_y", "E_z"};

void to_little(double v, char* out) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int b = 0; b < 8; ++b) out[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
}

double from_little(const unsigned char* in) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(in[b]) << (8 * b);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_snapshot(const std::string& path, const GridSpec& grid, const MaxwellState& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open snapshot for writing: " + path);
  nlohmann::ordered_json header;
  header["format"] = "varinv-snapshot";
  header["version"] = 1;
  header["n"] = grid.n;
  header["length"] = grid.length;
  header["dt"] = grid.dt;
  header["fields"] = std::vector<std::string>(std::begin(kFieldNames), std::end(kFieldNames));
  header["dtype"] = "float64";
  header["byte_order"] = "little";
  out << header.dump() << '\n';
  std::vector<char> buf(grid.points() * 8);
  for (int f = 0; f < 6; ++f) {
    const Lattice& l = f < 3 ? s.A[f] : s.E[f - 3];
    require_points(l, grid.points());
    for (std::size_t i = 0; i < l.size(); ++i) to_little(l[i], &buf[8 * i]);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw ConfigError("failed writing snapshot: " + path);
}

std::pair<GridSpec, MaxwellState> read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open snapshot: " + path);
  std::string line;
  std::getline(in, line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("snapshot header is not JSON: " + path);
  }
  if (header.value("format", "") != "varinv-snapshot" || header.value("byte_order", "") != "little" ||
      header.value("dtype", "") != "float64")
    throw ConfigError("unsupported snapshot header: " + path);
  const auto fields = header.value("fields", std::vector<std::string>{});
  if (fields != std::vector<std::string>(std::begin(kFieldNames), std::end(kFieldNames)))
    throw ConfigError("snapshot field list is not A_x..E_z: " + path);
  const GridSpec grid =
      GridSpec::make(header.value("n", 0), header.value("dt", 0.0), header.value("length", 0.0));
  MaxwellState s;
  std::vector<unsigned char> buf(grid.points() * 8);
  for (int f = 0; f < 6; ++f) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!in) throw ConfigError("snapshot is truncated: " + path);
    Lattice l(grid.points());
    for (std::size_t i = 0; i < l.size(); ++i) l[i] = from_little(&buf[8 * i]);
    (f < 3 ? s.A[f] : s.E[f - 3]) = std::move(l);
  }
  return {grid, std::move(s)};
}

}  // namespace varinv::field
