#pragma once

// Free Maxwell dynamics on the periodic lattice in temporal-plus-gauge form,
// its extension by the gauge sector (psi, mu), and the observables checked
// along the flow.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "varinv/field/grid.hpp"
#include "varinv/field/spectral.hpp"

namespace varinv::field {

struct MaxwellState {
  VecField A;
  VecField E;

  static MaxwellState zeros(const GridSpec& grid);
};

struct ExtendedState {
  VecField A_tilde;  // divergence-free part of A
  VecField E;
  Lattice psi;       // A = A_tilde + grad psi
  Lattice mu;

  static ExtendedState zeros(const GridSpec& grid);
};

struct Gauge {
  Lattice phi;  // zero mean
  std::string provenance;
  bool zero = true;

  static Gauge none(const GridSpec& grid);
  /// Band-limited phi with modes |m| <= cutoff, maxnorm 1, zero mean.
  static Gauge random_smooth(Spectral& spectral, std::uint64_t seed, double cutoff);
  /// Mean is removed.
  static Gauge from_lattice(Lattice phi, std::string provenance);
};

/// A_x-type single mode: A = amp e sin(2 pi m.x / L) with e orthogonal to m, E = 0.
MaxwellState standing_wave(const GridSpec& grid, std::array<int, 3> mode, double amp);
/// Divergence-free A and E with modes 0 < |m| <= cutoff, each of maxnorm 1.
MaxwellState random_state(Spectral& spectral, std::uint64_t seed, double cutoff);
/// Divergence-free field with modes 0 < |m| <= cutoff and maxnorm 1.
VecField random_solenoidal(Spectral& spectral, std::uint64_t seed, double cutoff);
/// Zero-mean scalar with modes 0 < |m| <= cutoff and maxnorm 1.
Lattice random_scalar(Spectral& spectral, std::uint64_t seed, double cutoff);

/// Parses `standing-wave:kx,ky,kz,amp`, `random:seed,cutoff` or `file:<path>`.
MaxwellState initial_condition(const std::string& spec, Spectral& spectral);

/// Divergence-free E is moved to the constraint surface by projection.
MaxwellState project_gauss(Spectral& spectral, MaxwellState s);

ExtendedState extend(Spectral& spectral, const MaxwellState& s, Lattice mu = {});
MaxwellState reduce(Spectral& spectral, const ExtendedState& s);

/// (dA, dE) = (E + grad phi, Laplacian A - grad div A).
std::pair<VecField, VecField> maxwell_rhs(Spectral& spectral, const MaxwellState& s,
                                          const Gauge& g);

/// Kick-drift-kick leapfrog. The force at the end of a step is reused as the
/// first kick of the next one within an evolve call.
class Integrator {
 public:
  explicit Integrator(const GridSpec& grid) : spectral_(grid) {}

  Spectral& spectral() { return spectral_; }
  const GridSpec& grid() const { return spectral_.grid(); }

  using MaxwellObserver = std::function<void(long step, const MaxwellState&)>;
  using ExtendedObserver = std::function<void(long step, const ExtendedState&)>;

  void evolve(MaxwellState& s, const Gauge& g, long steps, const MaxwellObserver& observe = {});
  void evolve(ExtendedState& s, const Gauge& g, long steps, const ExtendedObserver& observe = {});
  void step(MaxwellState& s, const Gauge& g) { evolve(s, g, 1); }
  void step(ExtendedState& s, const Gauge& g) { evolve(s, g, 1); }

 private:
  Spectral spectral_;
};

/// 1/2 sum E^2 + 1/2 sum |curl A|^2, times the cell volume.
double energy(Spectral& spectral, const MaxwellState& s);
double energy(Spectral& spectral, const ExtendedState& s);
/// maxnorm(div E).
double gauss_residual(Spectral& spectral, const VecField& E);

/// sum (d1.A_tilde d2.E - d2.A_tilde d1.E) dx^3.
double omega_pairing(const GridSpec& grid, const ExtendedState& d1, const ExtendedState& d2);
/// omega_pairing plus sum (grad d1.mu . grad d2.psi - grad d2.mu . grad d1.psi) dx^3.
double symplectic_product(Spectral& spectral, const ExtendedState& d1, const ExtendedState& d2);

struct SymplecticSample {
  std::string label;
  ExtendedState d1, d2;
};

struct PairingDrift {
  std::string label;
  double initial = 0;
  double final = 0;
  double max_relative_drift = 0;
};

/// Evolves the base state under g and every perturbation under the same
/// stepper with zero gauge; pairings are sampled every `check_every` steps.
std::vector<PairingDrift> flow_preserves_form(Integrator& integrator, ExtendedState& state,
                                              const Gauge& g, std::vector<SymplecticSample> pairs,
                                              long steps, long check_every = 100);

struct GaugeComparison {
  double field_scale = 0;     // max of maxnorm(E), maxnorm(curl A) over both runs
  double max_E_difference = 0;
  double max_B_difference = 0;
  double A_difference = 0;           // maxnorm of A1 - A2 at the end
  double A_difference_div_free = 0;  // maxnorm of its divergence-free part
};

GaugeComparison gauge_compare(Integrator& integrator, const MaxwellState& s0, const Gauge& g1,
                              const Gauge& g2, long steps);

/// One JSON header line, then A_x..A_z, E_x..E_z as little-endian float64.
void write_snapshot(const std::string& path, const GridSpec& grid, const MaxwellState& s);
std::pair<GridSpec, MaxwellState> read_snapshot(const std::string& path);

}  // namespace varinv::field
