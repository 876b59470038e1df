#include "varinv/field/action.hpp"

#include <algorithm>

namespace varinv::field {

namespace {

Lattice average(const Lattice& a, const Lattice& b) {
  Lattice r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = 0.5 * (a[i] + b[i]);
  return r;
}

VecField average(const VecField& a, const VecField& b) {
  VecField r;
  for (int k = 0; k < 3; ++k) r[k] = average(a[k], b[k]);
  return r;
}

Lattice rate(const Lattice& next, const Lattice& prev, double dt) {
  Lattice r(next.size());
  for (std::size_t i = 0; i < next.size(); ++i) r[i] = (next[i] - prev[i]) / dt;
  return r;
}

VecField rate(const VecField& next, const VecField& prev, double dt) {
  VecField r;
  for (int k = 0; k < 3; ++k) r[k] = rate(next[k], prev[k], dt);
  return r;
}

void check(Spectral& spectral, const std::vector<ExtendedState>& trajectory, const Gauge& g) {
  const std::size_t pts = spectral.grid().points();
  for (const auto& s : trajectory) {
    require_points(s.A_tilde, pts);
    require_points(s.E, pts);
    require_points(s.psi, pts);
    require_points(s.mu, pts);
  }
  require_points(g.phi, pts);
}

}  // namespace

ActionValue discrete_action(Spectral& spectral, const std::vector<ExtendedState>& trajectory,
                            const Gauge& g) {
  check(spectral, trajectory, g);
  if (trajectory.size() < 2) throw TrajectoryError("action needs at least 2 states");
  const double dt = spectral.grid().dt;
  const double vol = spectral.grid().cell_volume();
  const VecField grad_phi = spectral.grad(g.phi);
  CompensatedSum kinetic, gauge, hamiltonian;
  for (std::size_t m = 0; m + 1 < trajectory.size(); ++m) {
    const auto& a = trajectory[m];
    const auto& b = trajectory[m + 1];
    const VecField E_bar = average(a.E, b.E);
    kinetic.add(dt * vol * dot(E_bar, rate(b.A_tilde, a.A_tilde, dt)));
    VecField drive = spectral.grad(rate(b.psi, a.psi, dt));
    for (int k = 0; k < 3; ++k)
      for (std::size_t i = 0; i < drive[k].size(); ++i) drive[k][i] -= grad_phi[k][i];
    gauge.add(dt * vol * dot(spectral.grad(average(a.mu, b.mu)), drive));
    hamiltonian.add(dt * energy(spectral, MaxwellState{average(a.A_tilde, b.A_tilde), E_bar}));
  }
  ActionValue v{kinetic.value(), gauge.value(), hamiltonian.value(), 0};
  v.total = v.kinetic + v.gauge - v.hamiltonian;
  return v;
}

StationarityReport action_stationarity(Spectral& spectral,
                                       const std::vector<ExtendedState>& trajectory,
                                       const Gauge& g) {
  check(spectral, trajectory, g);
  if (trajectory.size() < 3) throw TrajectoryError("stationarity needs at least 3 states");
  const double dt = spectral.grid().dt;
  StationarityReport r;
  for (std::size_t m = 1; m + 1 < trajectory.size(); ++m) {
    const auto& p = trajectory[m - 1];
    const auto& c = trajectory[m];
    const auto& n = trajectory[m + 1];

    // dS/dE_m: (A~_{m+1} - A~_{m-1})/(2dt) - (E_{m-1} + 2E_m + E_{m+1})/4
    // dS/dA~_m: -(E_{m+1} - E_{m-1})/(2dt) - curl curl (A~_{m-1} + 2A~_m + A~_{m+1})/4
    VecField A_avg;
    for (int k = 0; k < 3; ++k) {
      A_avg[k].resize(c.A_tilde[k].size());
      for (std::size_t i = 0; i < A_avg[k].size(); ++i)
        A_avg[k][i] = 0.25 * p.A_tilde[k][i] + 0.5 * c.A_tilde[k][i] + 0.25 * n.A_tilde[k][i];
    }
    const VecField force = spectral.maxwell_force(A_avg);  // = -curl curl
    for (int k = 0; k < 3; ++k)
      for (std::size_t i = 0; i < A_avg[k].size(); ++i) {
        const double e = (n.A_tilde[k][i] - p.A_tilde[k][i]) / (2 * dt) -
                         0.25 * (p.E[k][i] + 2 * c.E[k][i] + n.E[k][i]);
        const double a = -(n.E[k][i] - p.E[k][i]) / (2 * dt) + force[k][i];
        r.e_residual = std::max(r.e_residual, std::abs(e));
        r.a_residual = std::max(r.a_residual, std::abs(a));
      }

    // dS/dmu_m: -Laplacian((Psi_{m-1} + Psi_m)/2 - phi), Psi = psi rate
    Lattice drive = average(rate(c.psi, p.psi, dt), rate(n.psi, c.psi, dt));
    for (std::size_t i = 0; i < drive.size(); ++i) drive[i] -= g.phi[i];
    r.psi_rate_residual = std::max(r.psi_rate_residual, maxnorm(spectral.laplacian(drive)));

    // dS/dpsi_m: -Laplacian(mu_bar_{m-1} - mu_bar_m)/dt
    const Lattice mu_change = rate(average(p.mu, c.mu), average(c.mu, n.mu), dt);
    r.mu_rate_residual = std::max(r.mu_rate_residual, maxnorm(spectral.laplacian(mu_change)));
    ++r.interior_times;
  }
  return r;
}

}  // namespace varinv::field
